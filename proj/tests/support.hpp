#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fontstat/atlas.hpp"
#include "fontstat/raster.hpp"
#include "fontstat/threshold.hpp"

namespace testing_support {

using namespace fontstat;

inline std::filesystem::path source_dir()
{
    return FONTSTAT_SOURCE_DIR;
}

inline std::filesystem::path atlas_dir()
{
    return source_dir() / "data" / "atlas";
}

/// Full shipped atlas, loaded once per test binary.
inline const FontAtlas& shipped_atlas()
{
    static const FontAtlas atlas = load_atlas(atlas_dir());
    return atlas;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("fontstat-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

template <class Rng>
BinaryMask random_mask(Rng& rng, int w, int h, double density)
{
    std::bernoulli_distribution on(density);
    BinaryMask m(w, h);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = on(rng) ? 1 : 0;
    return m;
}

inline BinaryMask mask_from(const std::vector<std::string>& rows)
{
    BinaryMask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) m.set(x, y, rows[y][x] == '#');
    return m;
}

// ---------------------------------------------------------------------------
// Oracles

/// Threshold maximizing w0*w1*(mu0-mu1)^2, scanned over all 256 candidates,
/// comparing n0*n1*(mu0-mu1)^2 = (n1*S0 - n0*S1)^2 / (n0*n1) by exact
/// cross-multiplication. Histograms must be small enough for 128-bit math.
inline int otsu_brute_force(const Histogram& h)
{
    using i128 = __int128;
    int best = -1;
    i128 best_num = 0, best_den = 1;
    for (int t = 0; t < 256; ++t) {
        i128 n0 = 0, n1 = 0, s0 = 0, s1 = 0;
        for (int v = 0; v < 256; ++v) {
            if (v <= t) {
                n0 += h[v];
                s0 += static_cast<i128>(h[v]) * v;
            } else {
                n1 += h[v];
                s1 += static_cast<i128>(h[v]) * v;
            }
        }
        if (n0 == 0 || n1 == 0) continue;
        const i128 diff = n1 * s0 - n0 * s1;
        const i128 num = diff * diff, den = n0 * n1;
        if (best < 0 || num * best_den > best_num * den) {
            best = t;
            best_num = num;
            best_den = den;
        }
    }
    return best;
}

/// Brute-force nearest-foreground scan.
inline double nearest_foreground(const BinaryMask& m, int x, int y)
{
    double best = std::numeric_limits<double>::infinity();
    for (int v = 0; v < m.height(); ++v)
        for (int u = 0; u < m.width(); ++u)
            if (m.test(u, v)) best = std::min(best, std::hypot(double(u - x), double(v - y)));
    return best;
}

/// d = #{a-pixels farther than tol from b} + #{b-pixels farther than tol from a},
/// comparing squared integer distances to avoid any transform.
inline std::size_t pseudo_hamming_direct(const BinaryMask& a, const BinaryMask& b, double tol)
{
    auto far_count = [tol](const BinaryMask& p, const BinaryMask& q) {
        std::size_t n = 0;
        for (int y = 0; y < p.height(); ++y)
            for (int x = 0; x < p.width(); ++x) {
                if (!p.test(x, y)) continue;
                long long best = std::numeric_limits<long long>::max();
                for (int v = 0; v < q.height(); ++v)
                    for (int u = 0; u < q.width(); ++u)
                        if (q.test(u, v)) best = std::min(best, 1LL * (u - x) * (u - x) + 1LL * (v - y) * (v - y));
                if (best == std::numeric_limits<long long>::max() || static_cast<double>(best) > tol * tol) ++n;
            }
        return n;
    };
    return far_count(a, b) + far_count(b, a);
}

/// Full-matrix Levenshtein.
inline std::size_t levenshtein_oracle(const std::string& a, const std::string& b)
{
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[a.size()][b.size()];
}

/// 8-connected flood fill labels; 0 = background, labels from 1.
inline std::vector<int> flood_labels(const BinaryMask& m, int& count)
{
    std::vector<int> label(m.size(), 0);
    count = 0;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            if (!m.test(x, y) || label[y * m.width() + x]) continue;
            ++count;
            std::vector<Point> stack{{x, y}};
            label[y * m.width() + x] = count;
            while (!stack.empty()) {
                const Point p = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int u = p.x + dx, v = p.y + dy;
                        if (!m.contains(u, v) || !m.test(u, v) || label[v * m.width() + u]) continue;
                        label[v * m.width() + u] = count;
                        stack.push_back({u, v});
                    }
            }
        }
    return label;
}

/// p_s straight from the definition, with no shared code.
inline std::vector<double> hand_formula(const std::vector<std::vector<double>>& d, int k)
{
    std::vector<double> p(d.size(), 0.0);
    std::vector<std::vector<double>> nearest(d.size());
    bool zero = false;
    for (std::size_t s = 0; s < d.size(); ++s) {
        nearest[s] = d[s];
        std::sort(nearest[s].begin(), nearest[s].end());
        if (nearest[s].size() > static_cast<std::size_t>(k)) nearest[s].resize(k);
        for (double v : nearest[s]) zero = zero || v == 0.0;
    }
    if (zero) {
        double n = 0;
        for (std::size_t s = 0; s < d.size(); ++s)
            if (std::find(nearest[s].begin(), nearest[s].end(), 0.0) != nearest[s].end()) {
                p[s] = 1;
                ++n;
            }
        for (double& v : p) v /= n;
        return p;
    }
    double total = 0;
    for (std::size_t s = 0; s < d.size(); ++s)
        for (double v : nearest[s]) {
            p[s] += 1.0 / v;
            total += 1.0 / v;
        }
    for (double& v : p) v /= total;
    return p;
}

} // namespace testing_support
