#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fontstat/csv.hpp"
#include "fontstat/style.hpp"

namespace fontstat {

/// Genre x category frequency table; every row sums to 1.
struct FrequencyTable {
    std::vector<std::string> columns;
    std::vector<std::string> genres;
    std::vector<std::size_t> counts;
    std::vector<std::vector<double>> rows;

    std::size_t find_genre(std::string_view genre) const
    {
        const auto it = std::find(genres.begin(), genres.end(), genre);
        require(it != genres.end(), "unknown genre '" + std::string(genre) + "'");
        return static_cast<std::size_t>(it - genres.begin());
    }

    const std::vector<double>& row(std::string_view genre) const { return rows[find_genre(genre)]; }

    /// Count-weighted mean row: the corpus-wide distribution.
    std::vector<double> overall() const
    {
        std::vector<double> out(columns.size(), 0.0);
        double total = 0.0;
        for (std::size_t g = 0; g < rows.size(); ++g) {
            for (std::size_t c = 0; c < columns.size(); ++c) out[c] += counts[g] * rows[g][c];
            total += static_cast<double>(counts[g]);
        }
        if (total > 0)
            for (double& v : out) v /= total;
        return out;
    }

    friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;
};

struct GenreStatsTable {
    FrequencyTable styles;
    FrequencyTable colors;
};

struct BookResult {
    std::string genre;
    StyleProbabilities style;
    std::size_t color_index = 0;
};

inline std::vector<std::string> palette_column_names(std::size_t k)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(fmt::format("color_{}", i));
    return out;
}

/// Per-genre mean style vector and color-index frequencies. Genres are
/// listed in lexicographic order.
inline GenreStatsTable aggregate_books(std::span<const BookResult> books, std::vector<std::string> style_names,
                                       std::size_t palette_size)
{
    require(!books.empty(), "no books to aggregate");
    std::map<std::string, std::vector<const BookResult*>> by_genre;
    for (const BookResult& b : books) {
        require(b.style.size() == style_names.size(), "style vector length does not match the taxonomy");
        require(b.color_index < palette_size, "color index outside the palette");
        by_genre[b.genre].push_back(&b);
    }
    GenreStatsTable t;
    t.styles.columns = std::move(style_names);
    t.colors.columns = palette_column_names(palette_size);
    for (const auto& [genre, list] : by_genre) {
        std::vector<double> s(t.styles.columns.size(), 0.0), c(palette_size, 0.0);
        for (const BookResult* b : list) {
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += b->style[i];
            c[b->color_index] += 1.0;
        }
        for (double& v : s) v /= static_cast<double>(list.size());
        for (double& v : c) v /= static_cast<double>(list.size());
        for (FrequencyTable* ft : {&t.styles, &t.colors}) {
            ft->genres.push_back(genre);
            ft->counts.push_back(list.size());
        }
        t.styles.rows.push_back(std::move(s));
        t.colors.rows.push_back(std::move(c));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Table CSV:  genre,count,<column>...

inline void write_table_csv(std::ostream& out, const FrequencyTable& t)
{
    out << "genre,count";
    for (const std::string& c : t.columns) out << ',' << csv::quote(c);
    out << '\n';
    for (std::size_t g = 0; g < t.genres.size(); ++g) {
        out << csv::quote(t.genres[g]) << ',' << t.counts[g];
        for (double v : t.rows[g]) out << ',' << csv::number(v);
        out << '\n';
    }
}

inline FrequencyTable read_table_csv(std::istream& in)
{
    const auto rows = csv::read_all(in);
    require(!rows.empty(), "table CSV is empty");
    const auto& head = rows[0];
    require(head.size() >= 3 && head[0] == "genre" && head[1] == "count",
            "table CSV header must start with genre,count and name at least one column");
    FrequencyTable t;
    t.columns.assign(head.begin() + 2, head.end());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        require(row.size() == head.size(), fmt::format("table CSV row {} has {} fields, expected {}", r + 1,
                                                       row.size(), head.size()));
        t.genres.push_back(row[0]);
        const long long count = csv::to_integer(row[1]);
        require(count >= 0, "negative count in table CSV");
        t.counts.push_back(static_cast<std::size_t>(count));
        std::vector<double> values;
        for (std::size_t c = 2; c < row.size(); ++c) values.push_back(csv::to_double(row[c]));
        t.rows.push_back(std::move(values));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Classical MDS

/// Dense square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), v_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return v_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> v_;
};

inline double euclidean(std::span<const double> a, std::span<const double> b)
{
    require(a.size() == b.size(), "vector length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Pairwise Euclidean distances between rows.
inline Matrix distance_matrix(std::span<const std::vector<double>> rows)
{
    Matrix d(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) d(i, j) = d(j, i) = euclidean(rows[i], rows[j]);
    return d;
}

struct MdsOptions {
    std::size_t dims = 2;
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

struct MdsResult {
    /// n x dims
    std::vector<std::vector<double>> coords;
    /// top-dims eigenvalues of the centered Gram matrix, before clamping
    std::vector<double> eigenvalues;
    /// Kruskal stress-1 of the embedding against the input distances
    double stress = 0.0;
};

namespace detail {

inline std::vector<double> mat_vec(const Matrix& b, const std::vector<double>& v)
{
    const std::size_t n = b.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += b(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool normalize(std::vector<double>& v)
{
    const double norm = std::sqrt(dot(v, v));
    if (norm == 0.0 || !std::isfinite(norm)) return false;
    for (double& x : v) x /= norm;
    return true;
}

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

// Dominant eigenpair of symmetric `b` (optionally shifted by `shift`),
// orthogonal to `basis`. Stops once ||Bv - lambda v|| <= tol * scale.
inline EigenPair power_iteration(const Matrix& b, double shift, const std::vector<std::vector<double>>& basis,
                                 double tol, double scale, int max_iter, std::uint64_t seed)
{
    const std::size_t n = b.size();
    std::mt19937_64 rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    auto orthogonalize = [&](std::vector<double>& x) {
        for (const auto& u : basis) {
            const double c = dot(x, u);
            for (std::size_t i = 0; i < n; ++i) x[i] -= c * u[i];
        }
    };
    orthogonalize(v);
    if (!normalize(v)) return {0.0, std::vector<double>(n, 0.0)};

    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> w = mat_vec(b, v);
        lambda = dot(v, w);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
        if (std::sqrt(res) <= tol * scale) break;
        for (std::size_t i = 0; i < n; ++i) w[i] += shift * v[i];
        orthogonalize(w);
        if (!normalize(w)) break;
        v = std::move(w);
    }
    // deterministic sign: largest-magnitude component positive
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(v[i]) > std::abs(v[arg]) + 1e-15) arg = i;
    if (v[arg] < 0)
        for (double& x : v) x = -x;
    return {lambda, v};
}

} // namespace detail

inline double kruskal_stress(const Matrix& d, std::span<const std::vector<double>> coords)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            const double e = euclidean(coords[i], coords[j]);
            num += (e - d(i, j)) * (e - d(i, j));
            den += d(i, j) * d(i, j);
        }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

/// Torgerson scaling: B = -1/2 J D^2 J, top eigenpairs by power iteration
/// with deflation, coordinates = eigenvector * sqrt(max(eigenvalue, 0)).
inline MdsResult classical_mds(const Matrix& d, const MdsOptions& opt = {})
{
    const std::size_t n = d.size();
    require(n >= 1, "distance matrix is empty");
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dmax = std::max(dmax, std::abs(d(i, j)));
    for (std::size_t i = 0; i < n; ++i) {
        require(d(i, i) == 0.0, "distance matrix diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            require(d(i, j) >= 0.0 && std::isfinite(d(i, j)), "distances must be finite and non-negative");
            require(std::abs(d(i, j) - d(j, i)) <= 1e-12 * std::max(1.0, dmax), "distance matrix is not symmetric");
        }
    }

    // double centering of squared distances
    Matrix b(n);
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += d(i, j) * d(i, j);
        grand += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = -0.5 * (d(i, j) * d(i, j) - row_mean[i] - row_mean[j] + grand);

    double frob = 0.0, gersh = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            frob += b(i, j) * b(i, j);
            r += std::abs(b(i, j));
        }
        gersh = std::max(gersh, r);
    }
    const double scale = std::max(std::sqrt(frob), 1e-300);

    MdsResult res;
    res.coords.assign(n, std::vector<double>(opt.dims, 0.0));
    Matrix work = b;
    std::vector<std::vector<double>> basis;
    for (std::size_t k = 0; k < opt.dims && k < n; ++k) {
        const std::uint64_t seed = 0x5eed + k;
        detail::EigenPair ep =
            detail::power_iteration(work, 0.0, basis, opt.tolerance, scale, opt.max_iterations, seed);
        if (ep.value < 0.0) {
            // dominant-magnitude eigenvalue is negative: shift to reach the
            // top of the spectrum instead
            ep = detail::power_iteration(work, gersh, basis, opt.tolerance, scale, opt.max_iterations, seed);
        }
        res.eigenvalues.push_back(ep.value);
        // eigenvalues within solver noise of zero contribute no axis
        const double root = ep.value > opt.tolerance * scale ? std::sqrt(ep.value) : 0.0;
        for (std::size_t i = 0; i < n; ++i) res.coords[i][k] = ep.vector[i] * root;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) work(i, j) -= ep.value * ep.vector[i] * ep.vector[j];
        basis.push_back(std::move(ep.vector));
    }
    for (std::size_t k = 0; k < opt.dims; ++k) {
        double mean = 0.0;
        for (const auto& c : res.coords) mean += c[k];
        mean /= static_cast<double>(n);
        for (auto& c : res.coords) c[k] -= mean;
    }
    res.stress = kruskal_stress(d, res.coords);
    return res;
}

struct Embedding2D {
    std::vector<std::string> genres;
    std::vector<std::array<double, 2>> coords;
    std::vector<double> eigenvalues;
    double stress = 0.0;
};

/// Genre-proximity embedding of a frequency table's rows.
inline Embedding2D embed_genres(const FrequencyTable& table)
{
    require(!table.rows.empty(), "table has no rows");
    const MdsResult mds = classical_mds(distance_matrix(table.rows));
    Embedding2D e;
    e.genres = table.genres;
    for (const auto& c : mds.coords) e.coords.push_back({c[0], c[1]});
    e.eigenvalues = mds.eigenvalues;
    e.stress = mds.stress;
    return e;
}

inline void write_embedding_csv(std::ostream& out, const Embedding2D& e)
{
    out << "genre,x,y\n";
    for (std::size_t i = 0; i < e.genres.size(); ++i)
        out << csv::quote(e.genres[i]) << ',' << csv::number(e.coords[i][0]) << ',' << csv::number(e.coords[i][1])
            << '\n';
}

inline Embedding2D read_embedding_csv(std::istream& in)
{
    const auto rows = csv::read_all(in);
    require(!rows.empty() && rows[0].size() == 3 && rows[0][0] == "genre", "embedding CSV header missing");
    Embedding2D e;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        require(rows[r].size() == 3, "embedding CSV row must have 3 fields");
        e.genres.push_back(rows[r][0]);
        e.coords.push_back({csv::to_double(rows[r][1]), csv::to_double(rows[r][2])});
    }
    return e;
}

/// Mean silhouette coefficient; points in singleton clusters score 0.
inline double silhouette_score(std::span<const std::vector<double>> points, std::span<const std::size_t> labels)
{
    require(points.size() == labels.size() && !points.empty(), "points and labels must align");
    std::map<std::size_t, std::size_t> sizes;
    for (std::size_t l : labels) ++sizes[l];
    require(sizes.size() >= 2, "silhouette needs at least two clusters");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (sizes[labels[i]] < 2) continue;
        std::map<std::size_t, double> sum;
        for (std::size_t j = 0; j < points.size(); ++j)
            if (j != i) sum[labels[j]] += euclidean(points[i], points[j]);
        const double a = sum[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [l, s] : sum)
            if (l != labels[i]) b = std::min(b, s / static_cast<double>(sizes[l]));
        const double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(points.size());
}

} // namespace fontstat
