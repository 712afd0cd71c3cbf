#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "fontstat/raster.hpp"

namespace fontstat {

namespace detail {

// Squared distance transform of a sampled 1-D function (lower envelope of
// parabolas, Felzenszwalb & Huttenlocher).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                   std::vector<double>& z)
{
    const int n = static_cast<int>(f.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        while (k >= 0) {
            const double s =
                ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * (q - v[k]));
            if (s <= z[k]) {
                --k;
                continue;
            }
            break;
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -inf
                      : ((f[q] + double(q) * q) - (f[v[k - 1]] + double(v[k - 1]) * v[k - 1])) /
                            (2.0 * (q - v[k - 1]));
        z[k + 1] = inf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) d[q] = inf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double dq = q - v[j];
        d[q] = dq * dq + f[v[j]];
    }
}

} // namespace detail

/// Exact Euclidean distance from each pixel to the nearest foreground pixel.
/// Foreground pixels map to 0; an all-background mask maps to +inf.
inline DistanceMap distance_transform(const BinaryMask& mask)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int w = mask.width(), h = mask.height();
    DistanceMap dist(w, h, inf);
    const int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    f.resize(h);
    d.resize(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = mask.test(x, y) ? 0.0 : inf;
        detail::edt_1d(f, d, v, z);
        for (int y = 0; y < h; ++y) dist.at(x, y) = d[y];
    }
    f.resize(w);
    d.resize(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = dist.at(x, y);
        detail::edt_1d(f, d, v, z);
        for (int x = 0; x < w; ++x) dist.at(x, y) = std::sqrt(d[x]);
    }
    return dist;
}

} // namespace fontstat
