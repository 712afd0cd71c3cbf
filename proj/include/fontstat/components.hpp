#pragma once

#include <algorithm>
#include <vector>

#include "fontstat/raster.hpp"

namespace fontstat {

struct Component {
    Box bbox;
    std::vector<Point> pixels;
};

/// 8-connected foreground components, ordered by (min-x, min-y).
inline std::vector<Component> connected_components(const BinaryMask& mask)
{
    std::vector<Component> out;
    if (mask.empty()) return out;
    const int w = mask.width(), h = mask.height();
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<Point> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!mask[i] || seen[i]) continue;
            Component comp;
            int x0 = x, x1 = x, y0 = y, y1 = y;
            seen[i] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Point p = stack.back();
                stack.pop_back();
                comp.pixels.push_back(p);
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = p.x + dx, ny = p.y + dy;
                        if ((dx == 0 && dy == 0) || !mask.contains(nx, ny)) continue;
                        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                        if (mask[j] && !seen[j]) {
                            seen[j] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
            std::sort(comp.pixels.begin(), comp.pixels.end(),
                      [](Point a, Point b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
            comp.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
            out.push_back(std::move(comp));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
        return a.bbox.x != b.bbox.x ? a.bbox.x < b.bbox.x : a.bbox.y < b.bbox.y;
    });
    return out;
}

/// Union of two components; pixel lists are concatenated and re-sorted.
inline Component merge(const Component& a, const Component& b)
{
    Component out;
    out.bbox = bounding_union(a.bbox, b.bbox);
    out.pixels = a.pixels;
    out.pixels.insert(out.pixels.end(), b.pixels.begin(), b.pixels.end());
    std::sort(out.pixels.begin(), out.pixels.end(),
              [](Point p, Point q) { return p.y != q.y ? p.y < q.y : p.x < q.x; });
    return out;
}

} // namespace fontstat
