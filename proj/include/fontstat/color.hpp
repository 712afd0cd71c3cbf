#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <span>
#include <tuple>
#include <vector>

#include "fontstat/color_space.hpp"
#include "fontstat/csv.hpp"
#include "fontstat/threshold.hpp"

namespace fontstat {

/// Mean stroke color of one or more crops plus the spread of the stroke
/// pixels around it (mean squared Lab distance), a multi-color flag.
struct ColorEstimate {
    LabColor mean;
    double variance = 0.0;
    std::size_t pixels = 0;
};

/// Otsu-separates strokes (minority class) in every crop and averages Lab
/// over the pooled stroke pixels.
inline ColorEstimate estimate_stroke_color(std::span<const RasterImage> crops)
{
    require(!crops.empty(), "no crops");
    double sl = 0, sa = 0, sb = 0, sq = 0;
    std::size_t n = 0;
    for (const RasterImage& crop : crops) {
        require(!crop.empty(), "empty crop");
        const Binarization bin = otsu_binarize(to_grayscale(crop));
        for (std::size_t i = 0; i < crop.size(); ++i) {
            if (!bin.mask[i]) continue;
            const LabColor c = rgb_to_lab(crop[i]);
            sl += c.L;
            sa += c.a;
            sb += c.b;
            sq += c.L * c.L + c.a * c.a + c.b * c.b;
            ++n;
        }
    }
    ColorEstimate out;
    out.pixels = n;
    out.mean = {sl / n, sa / n, sb / n};
    const auto& m = out.mean;
    out.variance = std::max(0.0, sq / n - (m.L * m.L + m.a * m.a + m.b * m.b));
    return out;
}

inline LabColor estimate_title_color(const RasterImage& crop)
{
    return estimate_stroke_color(std::span<const RasterImage>(&crop, 1)).mean;
}

struct Palette {
    std::vector<LabColor> centroids;
    std::uint64_t seed = 0;

    std::size_t size() const { return centroids.size(); }
};

/// Index of the nearest centroid (CIE76); ties go to the lowest index.
inline std::size_t quantize(const LabColor& color, const Palette& palette)
{
    require(palette.size() > 0, "empty palette");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < palette.size(); ++i) {
        const LabColor& c = palette.centroids[i];
        const double dl = color.L - c.L, da = color.a - c.a, db = color.b - c.b;
        const double d = dl * dl + da * da + db * db;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

struct KMeansResult {
    Palette palette;
    std::vector<std::size_t> assignment;
    /// within-cluster sum of squares after each update step
    std::vector<double> objective;
    int iterations = 0;
};

/// Colors closer than this (Delta E 76) count as the same color.
inline constexpr double kSameColorDeltaE = 1e-6;

/// Number of colors that differ by more than kSameColorDeltaE from every
/// other counted color.
inline std::size_t count_distinct(std::span<const LabColor> colors)
{
    std::vector<LabColor> sorted(colors.begin(), colors.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const LabColor& p, const LabColor& q) { return std::tie(p.L, p.a, p.b) < std::tie(q.L, q.a, q.b); });
    std::vector<LabColor> reps;
    for (const LabColor& c : sorted) {
        const bool seen = std::any_of(reps.begin(), reps.end(),
                                      [&](const LabColor& r) { return delta_e76(r, c) <= kSameColorDeltaE; });
        if (!seen) reps.push_back(c);
    }
    return reps.size();
}

/// Lloyd's k-means in Lab with k-means++ seeding. Stops when no assignment
/// changes or after `max_iterations`. Deterministic for a given seed: the
/// sampling uses raw mt19937_64 output only.
inline KMeansResult kmeans(std::span<const LabColor> colors, std::size_t k, std::uint64_t seed,
                           int max_iterations = 100)
{
    require(k >= 1, "palette size must be at least 1");
    require(colors.size() >= k, fmt::format("need at least {} colors for k-means, got {}", k, colors.size()));
    require(count_distinct(colors) >= k,
            fmt::format("need at least {} distinct colors for k-means", k));

    const std::size_t n = colors.size();
    auto sq = [](const LabColor& p, const LabColor& q) {
        const double dl = p.L - q.L, da = p.a - q.a, db = p.b - q.b;
        return dl * dl + da * da + db * db;
    };
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    std::vector<LabColor> centers;
    centers.push_back(colors[rng() % n]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq(colors[i], centers[0]);
    while (centers.size() < k) {
        double total = 0.0;
        for (double v : d2)
            if (v > kSameColorDeltaE * kSameColorDeltaE) total += v;
        const double target = uniform() * total;
        std::size_t pick = n;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] <= kSameColorDeltaE * kSameColorDeltaE) continue;
            acc += d2[i];
            pick = i;
            if (acc > target) break;
        }
        require(pick < n, "k-means seeding ran out of distinct colors");
        centers.push_back(colors[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq(colors[i], centers.back()));
    }

    KMeansResult res;
    res.palette.seed = seed;
    res.assignment.assign(n, k);
    Palette current{centers, seed};
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = quantize(colors[i], current);
            changed = changed || c != res.assignment[i];
            res.assignment[i] = c;
        }
        if (!changed) break;
        res.iterations = it + 1;

        std::vector<double> sl(k, 0), sa(k, 0), sb(k, 0);
        std::vector<std::size_t> cnt(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = res.assignment[i];
            sl[c] += colors[i].L;
            sa[c] += colors[i].a;
            sb[c] += colors[i].b;
            ++cnt[c];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (cnt[c] == 0) continue;
            current.centroids[c] = {sl[c] / cnt[c], sa[c] / cnt[c], sb[c] / cnt[c]};
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (cnt[c] > 0) continue;
            // re-seed an empty cluster at the point worst served by its centroid
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (cnt[res.assignment[i]] < 2) continue;
                const double d = sq(colors[i], current.centroids[res.assignment[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --cnt[res.assignment[far]];
            res.assignment[far] = c;
            cnt[c] = 1;
            current.centroids[c] = colors[far];
        }
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) wcss += sq(colors[i], current.centroids[res.assignment[i]]);
        res.objective.push_back(wcss);
    }
    res.palette = current;
    return res;
}

inline Palette build_palette(std::span<const LabColor> colors, std::size_t k, std::uint64_t seed = 0)
{
    return kmeans(colors, k, seed).palette;
}

inline void write_palette_csv(std::ostream& out, const Palette& palette)
{
    out << "index,L,a,b\n";
    for (std::size_t i = 0; i < palette.size(); ++i) {
        const LabColor& c = palette.centroids[i];
        out << i << ',' << csv::number(c.L) << ',' << csv::number(c.a) << ',' << csv::number(c.b) << '\n';
    }
}

inline Palette read_palette_csv(std::istream& in)
{
    Palette palette;
    const auto rows = csv::read_all(in);
    require(!rows.empty() && rows[0].size() == 4 && rows[0][0] == "index", "palette CSV header missing");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        require(rows[r].size() == 4, "palette CSV row must have 4 columns");
        require(csv::to_integer(rows[r][0]) == static_cast<long long>(r - 1), "palette indices must be 0..k-1");
        palette.centroids.push_back(
            {csv::to_double(rows[r][1]), csv::to_double(rows[r][2]), csv::to_double(rows[r][3])});
    }
    return palette;
}

} // namespace fontstat
