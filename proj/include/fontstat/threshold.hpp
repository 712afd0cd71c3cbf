#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "fontstat/raster.hpp"

namespace fontstat {

using Histogram = std::array<std::uint64_t, 256>;

inline Histogram histogram(const GrayImage& gray)
{
    Histogram h{};
    for (std::uint8_t v : gray.data()) ++h[v];
    return h;
}

/// Otsu threshold over a 256-bin histogram. Class 0 holds levels <= t.
/// The between-class variance is compared with exact integer arithmetic
/// so ties resolve to the smallest t independent of rounding.
inline int otsu_threshold(const Histogram& hist)
{
    using i128 = __int128;
    using u128 = unsigned __int128;

    std::uint64_t total = 0;
    std::uint64_t sum = 0;
    int distinct = 0;
    for (int v = 0; v < 256; ++v) {
        total += hist[v];
        sum += hist[v] * static_cast<std::uint64_t>(v);
        distinct += hist[v] > 0;
    }
    require(distinct >= 2, "degenerate histogram");
    require(total < (std::uint64_t{1} << 26), "image too large for exact Otsu");

    // sigma_b^2 * N^2 = (N*S0 - n0*S)^2 / (n0*n1); compare num/den fractions
    // via quotient then cross-multiplied remainders.
    int best_t = -1;
    u128 best_q = 0, best_r = 0, best_den = 1;
    std::uint64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 255; ++t) {
        n0 += hist[t];
        s0 += hist[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        const i128 d = static_cast<i128>(total) * s0 - static_cast<i128>(n0) * sum;
        const u128 num = static_cast<u128>(d < 0 ? -d : d) * static_cast<u128>(d < 0 ? -d : d);
        const u128 den = static_cast<u128>(n0) * n1;
        const u128 q = num / den;
        const u128 r = num % den;
        bool better = best_t < 0 || q > best_q;
        if (!better && q == best_q) better = r * best_den > best_r * den;
        if (better) {
            best_t = t;
            best_q = q;
            best_r = r;
            best_den = den;
        }
    }
    return best_t;
}

struct Binarization {
    int threshold = 0;
    /// true when the foreground is the darker class (levels <= threshold)
    bool dark_foreground = true;
    BinaryMask mask;
};

/// Otsu binarization with stroke polarity: the class with fewer pixels is
/// foreground; on an exact tie, the darker class.
inline Binarization otsu_binarize(const GrayImage& gray)
{
    const Histogram hist = histogram(gray);
    const int t = otsu_threshold(hist);
    std::uint64_t dark = 0;
    for (int v = 0; v <= t; ++v) dark += hist[v];
    const std::uint64_t light = gray.size() - dark;

    Binarization out;
    out.threshold = t;
    out.dark_foreground = dark <= light;
    out.mask = BinaryMask(gray.width(), gray.height());
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const bool is_dark = gray[i] <= t;
        out.mask[i] = is_dark == out.dark_foreground ? 1 : 0;
    }
    return out;
}

} // namespace fontstat
