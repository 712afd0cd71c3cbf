#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "fontstat/components.hpp"
#include "fontstat/distance.hpp"

namespace fontstat {

inline constexpr int kGlyphSize = 64;
inline constexpr double kDefaultTolerance = 1.0;

/// A binary glyph normalized to a square G x G canvas.
struct GlyphBitmap {
    BinaryMask mask;
    char label = '\0';

    int size() const { return mask.width(); }
};

/// A segmented character glyph paired with its title character.
struct LabeledComponent {
    GlyphBitmap glyph;
    /// left-to-right position among the segmented components of the word
    std::size_t order = 0;
    Box bbox;

    char label() const { return glyph.label; }
};

/// Tight-crops the pixel set, scales it (aspect preserved, nearest
/// neighbour) to fit a G x G canvas and centers it.
inline GlyphBitmap normalize_glyph(std::span<const Point> pixels, char label = '\0',
                                   int size = kGlyphSize)
{
    require(!pixels.empty(), "empty component");
    require(size >= 1, "glyph size must be positive");
    int x0 = pixels[0].x, x1 = x0, y0 = pixels[0].y, y1 = y0;
    for (const Point& p : pixels) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const int w = x1 - x0 + 1, h = y1 - y0 + 1;
    BinaryMask src(w, h);
    for (const Point& p : pixels) src.set(p.x - x0, p.y - y0);

    const double scale = static_cast<double>(size) / std::max(w, h);
    const int tw = std::clamp(static_cast<int>(std::lround(w * scale)), 1, size);
    const int th = std::clamp(static_cast<int>(std::lround(h * scale)), 1, size);
    const int ox = (size - tw) / 2, oy = (size - th) / 2;

    GlyphBitmap out{BinaryMask(size, size), label};
    auto source_index = [](int dst, int dst_extent, int src_extent) {
        const int s = static_cast<int>((dst + 0.5) * src_extent / dst_extent);
        return std::min(s, src_extent - 1);
    };
    for (int y = 0; y < th; ++y) {
        const int sy = source_index(y, th, h);
        for (int x = 0; x < tw; ++x)
            if (src.test(source_index(x, tw, w), sy)) out.mask.set(ox + x, oy + y);
    }
    if (out.mask.count() == 0) {
        // Sparse strokes can fall between samples on strong downscaling;
        // fall back to any-coverage sampling.
        for (const Point& p : pixels) {
            const int x = std::min(static_cast<int>((p.x - x0) * static_cast<double>(tw) / w), tw - 1);
            const int y = std::min(static_cast<int>((p.y - y0) * static_cast<double>(th) / h), th - 1);
            out.mask.set(ox + x, oy + y);
        }
    }
    return out;
}

inline GlyphBitmap normalize_glyph(const Component& comp, char label = '\0', int size = kGlyphSize)
{
    return normalize_glyph(std::span<const Point>(comp.pixels), label, size);
}

/// Normalizes all foreground pixels of a mask as one glyph.
inline GlyphBitmap normalize_glyph(const BinaryMask& mask, char label = '\0', int size = kGlyphSize)
{
    std::vector<Point> pixels;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.test(x, y)) pixels.push_back({x, y});
    return normalize_glyph(std::span<const Point>(pixels), label, size);
}

/// Tolerant two-sided mismatch count: foreground pixels of one bitmap lying
/// farther than `tolerance` from every foreground pixel of the other.
/// With tolerance 0 this is the Hamming distance of the two masks.
inline double pseudo_hamming(const BinaryMask& a, const BinaryMask& b, double tolerance = kDefaultTolerance)
{
    require(a.width() == b.width() && a.height() == b.height(), "glyph resolution mismatch");
    const DistanceMap dt_a = distance_transform(a);
    const DistanceMap dt_b = distance_transform(b);
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        count += a[i] && dt_b[i] > tolerance;
        count += b[i] && dt_a[i] > tolerance;
    }
    return static_cast<double>(count);
}

inline double pseudo_hamming(const GlyphBitmap& a, const GlyphBitmap& b, double tolerance = kDefaultTolerance)
{
    return pseudo_hamming(a.mask, b.mask, tolerance);
}

/// Bit-packed glyph with its tolerance neighbourhood precomputed, so that
/// repeated pseudo-Hamming queries reduce to popcounts.
class GlyphCode {
public:
    GlyphCode() = default;

    explicit GlyphCode(const BinaryMask& mask, double tolerance = kDefaultTolerance)
        : width_(mask.width()), height_(mask.height()), tolerance_(tolerance)
    {
        const std::size_t words = (mask.size() + 63) / 64;
        ink_.assign(words, 0);
        near_.assign(words, 0);
        const DistanceMap dt = distance_transform(mask);
        for (std::size_t i = 0; i < mask.size(); ++i) {
            const std::uint64_t bit = std::uint64_t{1} << (i % 64);
            if (mask[i]) ink_[i / 64] |= bit;
            if (dt[i] <= tolerance) near_[i / 64] |= bit;
        }
    }

    explicit GlyphCode(const GlyphBitmap& glyph, double tolerance = kDefaultTolerance)
        : GlyphCode(glyph.mask, tolerance)
    {
    }

    int width() const { return width_; }
    int height() const { return height_; }
    double tolerance() const { return tolerance_; }

    friend double pseudo_hamming(const GlyphCode& a, const GlyphCode& b)
    {
        require(a.width_ == b.width_ && a.height_ == b.height_, "glyph resolution mismatch");
        require(a.tolerance_ == b.tolerance_, "glyph codes built with different tolerances");
        std::uint64_t count = 0;
        for (std::size_t i = 0; i < a.ink_.size(); ++i) {
            count += std::popcount(a.ink_[i] & ~b.near_[i]);
            count += std::popcount(b.ink_[i] & ~a.near_[i]);
        }
        return static_cast<double>(count);
    }

private:
    int width_ = 0;
    int height_ = 0;
    double tolerance_ = kDefaultTolerance;
    std::vector<std::uint64_t> ink_;
    std::vector<std::uint64_t> near_;
};

} // namespace fontstat
