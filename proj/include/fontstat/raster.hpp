#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fontstat/error.hpp"

namespace fontstat {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle, half-open: [x, x+w) x [y, y+h).
struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    long long area() const { return static_cast<long long>(w) * h; }
    bool empty() const { return w <= 0 || h <= 0; }

    friend bool operator==(const Box&, const Box&) = default;
};

inline Box bounding_union(const Box& a, const Box& b)
{
    if (a.empty()) return b;
    if (b.empty()) return a;
    const int x0 = std::min(a.x, b.x);
    const int y0 = std::min(a.y, b.y);
    const int x1 = std::max(a.right(), b.right());
    const int y1 = std::max(a.bottom(), b.bottom());
    return {x0, y0, x1 - x0, y1 - y0};
}

inline Box intersection(const Box& a, const Box& b)
{
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.right(), b.right());
    const int y1 = std::min(a.bottom(), b.bottom());
    if (x1 <= x0 || y1 <= y0) return {};
    return {x0, y0, x1 - x0, y1 - y0};
}

inline double iou(const Box& a, const Box& b)
{
    const long long inter = intersection(a, b).area();
    const long long uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

/// Dense row-major 2-D grid. A default-constructed grid is empty; a sized
/// grid always has width >= 1 and height >= 1.
template <class T>
class Grid {
public:
    using value_type = T;

    Grid() = default;

    Grid(int width, int height, T fill = T{}) : width_(width), height_(height)
    {
        require(width >= 1 && height >= 1, "grid dimensions must be positive");
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    T& at(int x, int y) { return data_[index(x, y)]; }
    const T& at(int x, int y) const { return data_[index(x, y)]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    Box bounds() const { return {0, 0, width_, height_}; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using RasterImage = Grid<Rgb>;
using GrayImage = Grid<std::uint8_t>;
using DistanceMap = Grid<double>;

/// Foreground/background bitmap; nonzero = foreground.
class BinaryMask : public Grid<std::uint8_t> {
public:
    using Grid::Grid;

    bool test(int x, int y) const { return at(x, y) != 0; }
    void set(int x, int y, bool on = true) { at(x, y) = on ? 1 : 0; }

    std::size_t count() const
    {
        return static_cast<std::size_t>(
            std::count_if(data().begin(), data().end(), [](std::uint8_t v) { return v != 0; }));
    }
};

/// Copies the sub-rectangle `box` (clipped to the grid).
template <class G>
G crop(const G& src, Box box)
{
    box = intersection(box, src.bounds());
    require(!box.empty(), "crop box lies outside the image");
    G out(box.w, box.h);
    for (int y = 0; y < box.h; ++y)
        for (int x = 0; x < box.w; ++x) out.at(x, y) = src.at(box.x + x, box.y + y);
    return out;
}

/// Rec. 601 luma, rounded to nearest.
inline std::uint8_t luma(Rgb c)
{
    const double v = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline GrayImage to_grayscale(const RasterImage& img)
{
    require(!img.empty(), "empty image");
    GrayImage gray(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) gray[i] = luma(img[i]);
    return gray;
}

} // namespace fontstat
