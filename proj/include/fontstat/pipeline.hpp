#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fontstat/ads.hpp"
#include "fontstat/analytics.hpp"
#include "fontstat/color.hpp"
#include "fontstat/extraction.hpp"
#include "fontstat/image_io.hpp"
#include "fontstat/parallel.hpp"
#include "fontstat/report.hpp"
#include "fontstat/style.hpp"

namespace fontstat {

// ---------------------------------------------------------------------------
// Books

enum class BookStatus { Matched, Unmatched, Failed };

inline const char* to_string(BookStatus s)
{
    switch (s) {
    case BookStatus::Matched: return "matched";
    case BookStatus::Unmatched: return "unmatched";
    case BookStatus::Failed: return "failed";
    }
    return "failed";
}

struct BookOutcome {
    BookRecord record;
    BookStatus status = BookStatus::Failed;
    std::string message;
    std::vector<TextRegion> title_regions;
    std::size_t components = 0;
    StyleProbabilities style;
    ColorEstimate color;
    std::optional<std::size_t> color_index;
};

/// Title extraction, style and stroke-color estimation for one cover.
/// Never throws for data problems; they are reported in the outcome.
inline BookOutcome analyze_cover(const BookRecord& record, const RasterImage& image, const WordDetector& detector,
                                 const FontAtlas& atlas, int k)
{
    BookOutcome out;
    out.record = record;
    try {
        const std::vector<TextRegion> regions = detect_words(image, detector, record.id);
        const std::vector<std::string> tokens = tokenize(record.title);
        const std::vector<TokenMatch> matches = assign_title_tokens(regions, tokens);
        if (matches.empty()) {
            out.status = BookStatus::Unmatched;
            out.message = fmt::format("no region matched the title ({} regions)", regions.size());
            return out;
        }
        std::vector<LabeledComponent> comps;
        std::vector<RasterImage> crops;
        for (const TokenMatch& m : matches) {
            const TextRegion& r = regions[m.region];
            out.title_regions.push_back(r);
            const RasterImage crop = fontstat::crop(image, padded(r.bbox, crop_margin(r.bbox), image.bounds()));
            auto labeled = segment_characters(crop, tokens[m.token], atlas.glyph_size());
            comps.insert(comps.end(), std::make_move_iterator(labeled.begin()), std::make_move_iterator(labeled.end()));
            crops.push_back(crop);
        }
        out.components = comps.size();
        out.style = title_style_usage(std::span<const LabeledComponent>(comps), atlas, k);
        out.color = estimate_stroke_color(crops);
        out.status = BookStatus::Matched;
    } catch (const Error& e) {
        out.status = BookStatus::Failed;
        out.message = e.what();
    }
    return out;
}

struct BooksConfig {
    std::filesystem::path corpus;
    int k = 3;
    std::size_t palette_size = 16;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> boxes;
    std::size_t workers = 1;
};

struct BooksReport {
    std::vector<BookOutcome> outcomes; ///< sorted by record id
    Palette palette;
    GenreStatsTable table;
    std::size_t matched = 0;
    std::vector<std::string> notes;

    std::size_t total() const { return outcomes.size(); }
    std::string summary() const { return fmt::format("{}/{} matched", matched, total()); }
};

/// Quantizes matched outcomes against a palette built from their colors and
/// aggregates per genre. The palette shrinks when there are fewer distinct
/// colors than requested.
inline void finish_books(BooksReport& report, std::vector<std::string> style_names, std::size_t palette_size,
                         std::uint64_t seed)
{
    std::sort(report.outcomes.begin(), report.outcomes.end(),
              [](const BookOutcome& a, const BookOutcome& b) { return a.record.id < b.record.id; });
    std::vector<LabColor> colors;
    for (const BookOutcome& o : report.outcomes)
        if (o.status == BookStatus::Matched) colors.push_back(o.color.mean);
    report.matched = colors.size();
    require(!colors.empty(), fmt::format("no book titles matched ({} books)", report.outcomes.size()));

    const std::size_t distinct = count_distinct(colors);
    std::size_t k = palette_size;
    if (distinct < k) {
        report.notes.push_back(
            fmt::format("palette size reduced from {} to {}: only {} distinct title colors", k, distinct, distinct));
        k = distinct;
    }
    report.palette = build_palette(colors, k, seed);

    std::vector<BookResult> results;
    for (BookOutcome& o : report.outcomes) {
        if (o.status != BookStatus::Matched) continue;
        o.color_index = quantize(o.color.mean, report.palette);
        results.push_back({o.record.genre, o.style, *o.color_index});
    }
    report.table = aggregate_books(results, std::move(style_names), report.palette.size());
}

inline BooksReport run_books(const BooksConfig& cfg, const FontAtlas& atlas)
{
    require(cfg.k >= 1, "K must be at least 1");
    const std::vector<BookRecord> records = read_book_records(cfg.corpus / "metadata.jsonl");
    require(!records.empty(), "no books in corpus " + cfg.corpus.string());

    std::unique_ptr<WordDetector> detector;
    if (cfg.boxes)
        detector = std::make_unique<ExternalBoxDetector>(read_detections(*cfg.boxes));
    else
        detector = std::make_unique<BaselineDetector>(atlas);

    BooksReport report;
    report.outcomes.resize(records.size());
    parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
        try {
            const RasterImage img = read_image(cfg.corpus / records[i].image);
            report.outcomes[i] = analyze_cover(records[i], img, *detector, atlas, cfg.k);
        } catch (const std::exception& e) {
            report.outcomes[i].record = records[i];
            report.outcomes[i].status = BookStatus::Failed;
            report.outcomes[i].message = e.what();
        }
    });
    finish_books(report, atlas.taxonomy().names(), cfg.palette_size, cfg.seed);
    return report;
}

inline nlohmann::json to_json(const BookOutcome& o)
{
    nlohmann::json j{{"id", o.record.id}, {"genre", o.record.genre}, {"title", o.record.title},
                     {"status", to_string(o.status)}};
    if (!o.message.empty()) j["message"] = o.message;
    if (o.status == BookStatus::Matched) {
        j["style"] = o.style.p;
        j["color_lab"] = {o.color.mean.L, o.color.mean.a, o.color.mean.b};
        j["color_variance"] = o.color.variance;
        if (o.color_index) j["color_index"] = *o.color_index;
        j["components"] = o.components;
        nlohmann::json regions = nlohmann::json::array();
        for (const TextRegion& r : o.title_regions)
            regions.push_back({{"x", r.bbox.x}, {"y", r.bbox.y}, {"w", r.bbox.w}, {"h", r.bbox.h}, {"word", r.word}});
        j["title_regions"] = regions;
    }
    return j;
}

namespace detail {

template <class F>
void write_file(const std::filesystem::path& path, F&& writer)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    writer(out);
    if (!out) throw Error("write failed: " + path.string());
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    write_file(path, [&](std::ostream& o) { o << text; });
}

} // namespace detail

/// per_book.jsonl, style_stats.csv, color_stats.csv, palette.csv,
/// style_heatmap.svg, color_heatmap.svg, summary.txt
inline void write_books_outputs(const BooksReport& report, const std::filesystem::path& out)
{
    std::filesystem::create_directories(out);
    detail::write_file(out / "per_book.jsonl", [&](std::ostream& o) {
        for (const BookOutcome& b : report.outcomes) o << to_json(b).dump() << '\n';
    });
    detail::write_file(out / "style_stats.csv", [&](std::ostream& o) { write_table_csv(o, report.table.styles); });
    detail::write_file(out / "color_stats.csv", [&](std::ostream& o) { write_table_csv(o, report.table.colors); });
    detail::write_file(out / "palette.csv", [&](std::ostream& o) { write_palette_csv(o, report.palette); });
    detail::write_text(out / "style_heatmap.svg", emit_heatmap_svg(report.table.styles, nullptr, "Font style usage"));
    detail::write_text(out / "color_heatmap.svg",
                       emit_heatmap_svg(report.table.colors, &report.palette, "Font color usage"));
    std::string summary = report.summary() + "\n";
    for (const std::string& n : report.notes) summary += n + "\n";
    detail::write_text(out / "summary.txt", summary);
}

// ---------------------------------------------------------------------------
// Ads

struct AdsConfig {
    std::filesystem::path corpus;
    std::filesystem::path lookup;
    std::size_t palette_size = 8;
    std::uint64_t seed = 0;
    WeightMode weighting = WeightMode::SizeTimesLength;
    std::vector<std::string> style_names = StyleTaxonomy::default_ad_names();
};

struct AdsReport {
    AdStats stats;
    Palette palette;
    std::vector<std::string> notes;
};

inline AdsReport analyze_ads(std::span<const AdDesign> designs, const FontNameLookup& lookup,
                             std::size_t palette_size, std::uint64_t seed, WeightMode mode)
{
    require(!designs.empty(), "no ad designs");
    const std::vector<LabColor> colors = usable_ad_colors(designs, lookup, mode);
    require(!colors.empty(), "no usable designs: every text uses an unclear font");
    AdsReport report;
    std::size_t k = palette_size;
    const std::size_t distinct = count_distinct(colors);
    if (distinct < k) {
        report.notes.push_back(
            fmt::format("palette size reduced from {} to {}: only {} distinct text colors", k, distinct, distinct));
        k = distinct;
    }
    report.palette = build_palette(colors, k, seed);
    report.stats = genre_ad_stats(designs, lookup, report.palette, mode);
    for (const std::string& w : report.stats.warnings) report.notes.push_back(w);
    return report;
}

inline AdsReport run_ads(const AdsConfig& cfg)
{
    const FontNameLookup lookup = load_font_lookup(cfg.lookup, StyleTaxonomy::ads(cfg.style_names));
    const std::vector<AdDesign> designs = read_ad_designs(cfg.corpus);
    return analyze_ads(designs, lookup, cfg.palette_size, cfg.seed, cfg.weighting);
}

inline std::string ads_summary(const AdStats& s)
{
    return fmt::format("{}/{} designs usable; {} products; {:.2f} designs per product", s.designs_used,
                       s.designs_total, s.products_total, s.designs_per_product());
}

inline void write_ads_outputs(const AdsReport& report, const std::filesystem::path& out)
{
    std::filesystem::create_directories(out);
    const GenreStatsTable& t = report.stats.table;
    detail::write_file(out / "style_stats.csv", [&](std::ostream& o) { write_table_csv(o, t.styles); });
    detail::write_file(out / "color_stats.csv", [&](std::ostream& o) { write_table_csv(o, t.colors); });
    detail::write_file(out / "palette.csv", [&](std::ostream& o) { write_palette_csv(o, report.palette); });
    detail::write_text(out / "style_heatmap.svg", emit_heatmap_svg(t.styles, nullptr, "Ad font style usage"));
    detail::write_text(out / "color_heatmap.svg", emit_heatmap_svg(t.colors, &report.palette, "Ad font color usage"));
    std::string summary = ads_summary(report.stats) + "\n";
    for (const std::string& n : report.notes) summary += n + "\n";
    detail::write_text(out / "summary.txt", summary);
}

// ---------------------------------------------------------------------------
// MDS

inline Embedding2D run_mds(const std::filesystem::path& table_csv, const std::filesystem::path& out)
{
    std::ifstream in(table_csv);
    if (!in) throw Error("cannot open " + table_csv.string());
    const FrequencyTable table = read_table_csv(in);
    const Embedding2D e = embed_genres(table);
    std::filesystem::create_directories(out);
    detail::write_file(out / "embedding.csv", [&](std::ostream& o) { write_embedding_csv(o, e); });
    detail::write_text(out / "embedding.svg", emit_scatter_svg(e, "Genre proximity"));
    return e;
}

} // namespace fontstat
