#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fontstat/analytics.hpp"
#include "fontstat/color.hpp"
#include "fontstat/extraction.hpp"

namespace fontstat {

struct AdTextRecord {
    std::string text;
    /// exact font name; empty for bitmap-embedded text
    std::string font;
    double size = 0.0;
    Rgb color;
};

struct AdDesign {
    std::string design_id;
    std::string product_id;
    std::string genre;
    std::vector<AdTextRecord> records;
};

enum class WeightMode {
    SizeTimesLength, ///< size x character count
    Size,            ///< size only
};

inline double record_weight(const AdTextRecord& r, WeightMode mode)
{
    if (r.size <= 0.0 || r.text.empty()) return 0.0;
    return mode == WeightMode::Size ? r.size : r.size * static_cast<double>(r.text.size());
}

namespace detail {

struct UsableRecord {
    std::size_t style;
    double weight;
    const AdTextRecord* record;
};

inline std::vector<UsableRecord> usable_records(const AdDesign& design, const FontNameLookup& lookup, WeightMode mode)
{
    std::vector<UsableRecord> out;
    for (const AdTextRecord& r : design.records) {
        const auto style = lookup.lookup_style(r.font);
        const double w = record_weight(r, mode);
        if (style && w > 0.0) out.push_back({*style, w, &r});
    }
    return out;
}

} // namespace detail

/// Size-weighted style distribution of one design; unclear fonts are dropped.
inline StyleProbabilities design_style_usage(const AdDesign& design, const FontNameLookup& lookup,
                                             WeightMode mode = WeightMode::SizeTimesLength)
{
    const auto usable = detail::usable_records(design, lookup, mode);
    require(!usable.empty(), "no usable text in design " + design.design_id);
    StyleProbabilities p{std::vector<double>(lookup.taxonomy().size(), 0.0)};
    double total = 0.0;
    for (const auto& u : usable) {
        p.p[u.style] += u.weight;
        total += u.weight;
    }
    for (double& v : p.p) v /= total;
    return p;
}

/// Color distribution over palette entries, weighted like the style vector.
inline std::vector<double> design_color_usage(const AdDesign& design, const FontNameLookup& lookup,
                                              const Palette& palette, WeightMode mode = WeightMode::SizeTimesLength)
{
    const auto usable = detail::usable_records(design, lookup, mode);
    require(!usable.empty(), "no usable text in design " + design.design_id);
    std::vector<double> c(palette.size(), 0.0);
    double total = 0.0;
    for (const auto& u : usable) {
        c[quantize(rgb_to_lab(u.record->color), palette)] += u.weight;
        total += u.weight;
    }
    for (double& v : c) v /= total;
    return c;
}

/// Lab colors of every usable record, the k-means input for the ad palette.
inline std::vector<LabColor> usable_ad_colors(std::span<const AdDesign> designs, const FontNameLookup& lookup,
                                              WeightMode mode = WeightMode::SizeTimesLength)
{
    std::vector<LabColor> out;
    for (const AdDesign& d : designs)
        for (const auto& u : detail::usable_records(d, lookup, mode)) out.push_back(rgb_to_lab(u.record->color));
    return out;
}

struct AdStats {
    /// counts = usable designs per genre
    GenreStatsTable table;
    std::vector<std::size_t> products;
    std::size_t designs_total = 0;
    std::size_t designs_used = 0;
    std::size_t products_total = 0;
    std::vector<std::string> warnings;

    double designs_per_product() const
    {
        return products_total ? static_cast<double>(designs_used) / static_cast<double>(products_total) : 0.0;
    }
};

/// Two-level aggregation: designs are averaged within their product, then
/// products within their genre.
inline AdStats genre_ad_stats(std::span<const AdDesign> designs, const FontNameLookup& lookup, const Palette& palette,
                              WeightMode mode = WeightMode::SizeTimesLength)
{
    struct ProductAcc {
        std::vector<double> style, color;
        std::size_t designs = 0;
    };
    std::map<std::string, std::map<std::string, ProductAcc>> acc; // genre -> product -> sums
    std::set<std::string> seen_genres;
    AdStats out;
    out.designs_total = designs.size();
    const std::size_t ns = lookup.taxonomy().size();
    for (const AdDesign& d : designs) {
        seen_genres.insert(d.genre);
        if (detail::usable_records(d, lookup, mode).empty()) continue;
        const StyleProbabilities s = design_style_usage(d, lookup, mode);
        const std::vector<double> c = design_color_usage(d, lookup, palette, mode);
        ProductAcc& p = acc[d.genre][d.product_id];
        if (p.designs == 0) {
            p.style.assign(ns, 0.0);
            p.color.assign(palette.size(), 0.0);
        }
        for (std::size_t i = 0; i < ns; ++i) p.style[i] += s.p[i];
        for (std::size_t i = 0; i < c.size(); ++i) p.color[i] += c[i];
        ++p.designs;
        ++out.designs_used;
    }
    for (const std::string& g : seen_genres)
        if (!acc.count(g)) out.warnings.push_back("genre '" + g + "' has no usable designs; dropped");
    require(!acc.empty(), "no usable designs");

    GenreStatsTable& t = out.table;
    t.styles.columns = lookup.taxonomy().names();
    t.colors.columns = palette_column_names(palette.size());
    for (const auto& [genre, products] : acc) {
        std::vector<double> s(ns, 0.0), c(palette.size(), 0.0);
        std::size_t used = 0;
        for (const auto& [pid, p] : products) {
            for (std::size_t i = 0; i < ns; ++i) s[i] += p.style[i] / static_cast<double>(p.designs);
            for (std::size_t i = 0; i < c.size(); ++i) c[i] += p.color[i] / static_cast<double>(p.designs);
            used += p.designs;
        }
        for (double& v : s) v /= static_cast<double>(products.size());
        for (double& v : c) v /= static_cast<double>(products.size());
        for (FrequencyTable* ft : {&t.styles, &t.colors}) {
            ft->genres.push_back(genre);
            ft->counts.push_back(used);
        }
        t.styles.rows.push_back(std::move(s));
        t.colors.rows.push_back(std::move(c));
        out.products.push_back(products.size());
        out.products_total += products.size();
    }
    return out;
}

inline AdDesign parse_ad_design(const nlohmann::json& j)
{
    AdDesign d;
    d.design_id = j.at("design_id").get<std::string>();
    d.product_id = j.at("product_id").get<std::string>();
    d.genre = j.at("genre").get<std::string>();
    for (const auto& t : j.at("texts")) {
        AdTextRecord r;
        r.text = t.at("text").get<std::string>();
        if (t.contains("font") && !t.at("font").is_null()) r.font = t.at("font").get<std::string>();
        r.size = t.at("size").get<double>();
        const auto& rgb = t.at("rgb");
        require(rgb.is_array() && rgb.size() == 3, "rgb must be a 3-element array");
        auto channel = [](const nlohmann::json& v) {
            const int c = v.get<int>();
            require(c >= 0 && c <= 255, "rgb channel out of range");
            return static_cast<std::uint8_t>(c);
        };
        r.color = {channel(rgb[0]), channel(rgb[1]), channel(rgb[2])};
        d.records.push_back(std::move(r));
    }
    return d;
}

inline std::vector<AdDesign> read_ad_designs(const std::filesystem::path& path)
{
    std::vector<AdDesign> out;
    detail::for_each_jsonl(path, [&](const nlohmann::json& j) { out.push_back(parse_ad_design(j)); });
    return out;
}

} // namespace fontstat
