#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fontstat/atlas.hpp"
#include "fontstat/threshold.hpp"

namespace fontstat {

struct TextRegion {
    Box bbox;
    std::string word;
    double confidence = 1.0;
};

struct BookRecord {
    std::string id;
    std::string title;
    std::string genre;
    std::string image;
};

// ---------------------------------------------------------------------------
// Edit distance and title matching

/// Levenshtein distance with unit costs.
inline std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

inline std::string to_lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Edit distance divided by the longer length, case-insensitive.
inline double normalized_edit_distance(std::string_view a, std::string_view b)
{
    const std::size_t len = std::max(a.size(), b.size());
    if (len == 0) return 0.0;
    return static_cast<double>(edit_distance(to_lower(a), to_lower(b))) / static_cast<double>(len);
}

inline std::vector<std::string> tokenize(std::string_view title)
{
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : title) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) tokens.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

inline constexpr double kTitleMatchThreshold = 0.3;

struct TokenMatch {
    std::size_t token = 0;
    std::size_t region = 0;
    double distance = 0.0;
};

/// Greedy one-to-one assignment of title tokens to regions, cheapest pair
/// first (ties: lower token, then lower region). Pairs above `threshold`
/// are never accepted. Result is in token order.
inline std::vector<TokenMatch> assign_title_tokens(std::span<const TextRegion> regions,
                                                   std::span<const std::string> tokens,
                                                   double threshold = kTitleMatchThreshold)
{
    std::vector<TokenMatch> pairs;
    for (std::size_t t = 0; t < tokens.size(); ++t)
        for (std::size_t r = 0; r < regions.size(); ++r) {
            const double d = normalized_edit_distance(tokens[t], regions[r].word);
            if (d <= threshold) pairs.push_back({t, r, d});
        }
    std::stable_sort(pairs.begin(), pairs.end(), [](const TokenMatch& a, const TokenMatch& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.token != b.token ? a.token < b.token : a.region < b.region;
    });
    std::vector<bool> token_used(tokens.size()), region_used(regions.size());
    std::vector<TokenMatch> out;
    for (const TokenMatch& m : pairs) {
        if (token_used[m.token] || region_used[m.region]) continue;
        token_used[m.token] = region_used[m.region] = true;
        out.push_back(m);
    }
    std::sort(out.begin(), out.end(), [](const TokenMatch& a, const TokenMatch& b) { return a.token < b.token; });
    return out;
}

/// Regions holding the title, in title-token order. Empty when nothing matches.
inline std::vector<TextRegion> match_title(std::span<const TextRegion> regions, std::string_view title,
                                           double threshold = kTitleMatchThreshold)
{
    require(!title.empty(), "empty title");
    const std::vector<std::string> tokens = tokenize(title);
    std::vector<TextRegion> out;
    for (const TokenMatch& m : assign_title_tokens(regions, tokens, threshold)) out.push_back(regions[m.region]);
    return out;
}

// ---------------------------------------------------------------------------
// Component grouping

/// Horizontal overlap of two boxes relative to the narrower one.
inline double horizontal_overlap(const Box& a, const Box& b)
{
    const int overlap = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const int narrow = std::min(a.w, b.w);
    return narrow > 0 && overlap > 0 ? static_cast<double>(overlap) / narrow : 0.0;
}

inline double vertical_overlap(const Box& a, const Box& b)
{
    const int overlap = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    const int narrow = std::min(a.h, b.h);
    return narrow > 0 && overlap > 0 ? static_cast<double>(overlap) / narrow : 0.0;
}

/// Merges components whose horizontal spans overlap by more than half of the
/// narrower span (i-dots, accents, split strokes), then sorts by min-x.
inline std::vector<Component> merge_stacked(std::vector<Component> comps)
{
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < comps.size() && !merged; ++i)
            for (std::size_t j = i + 1; j < comps.size() && !merged; ++j)
                if (horizontal_overlap(comps[i].bbox, comps[j].bbox) > 0.5) {
                    comps[i] = merge(comps[i], comps[j]);
                    comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(j));
                    merged = true;
                }
    }
    std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        return a.bbox.x != b.bbox.x ? a.bbox.x < b.bbox.x : a.bbox.y < b.bbox.y;
    });
    return comps;
}

/// Binarizes a crop and returns its merged character components.
inline std::vector<Component> character_components(const RasterImage& crop)
{
    require(!crop.empty(), "empty crop");
    const Binarization bin = otsu_binarize(to_grayscale(crop));
    return merge_stacked(connected_components(bin.mask));
}

struct WordBox {
    Box bbox;
    std::vector<Component> components;
};

/// Geometric word finder for clean renders: components are grouped into
/// lines by vertical overlap >= 50% and lines are split into words at
/// horizontal gaps wider than 0.6 x the median component width.
inline std::vector<WordBox> find_word_boxes(const RasterImage& img)
{
    const GrayImage gray = to_grayscale(img);
    const Histogram hist = histogram(gray);
    if (std::count_if(hist.begin(), hist.end(), [](std::uint64_t c) { return c > 0; }) < 2) return {};
    std::vector<Component> comps = connected_components(otsu_binarize(gray).mask);

    std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        return a.bbox.y != b.bbox.y ? a.bbox.y < b.bbox.y : a.bbox.x < b.bbox.x;
    });
    struct Line {
        Box span;
        std::vector<Component> comps;
    };
    std::vector<Line> lines;
    for (Component& c : comps) {
        Line* home = nullptr;
        double best = 0.5;
        for (Line& l : lines) {
            const double v = vertical_overlap(c.bbox, l.span);
            if (v >= best) {
                best = v;
                home = &l;
                if (v >= 1.0) break;
            }
        }
        if (!home) {
            lines.push_back({c.bbox, {}});
            home = &lines.back();
        }
        home->span = bounding_union(home->span, c.bbox);
        home->comps.push_back(std::move(c));
    }

    std::vector<WordBox> words;
    for (Line& l : lines) {
        std::sort(l.comps.begin(), l.comps.end(), [](const Component& a, const Component& b) {
            return a.bbox.x != b.bbox.x ? a.bbox.x < b.bbox.x : a.bbox.y < b.bbox.y;
        });
        std::vector<int> widths;
        for (const Component& c : l.comps) widths.push_back(c.bbox.w);
        std::nth_element(widths.begin(), widths.begin() + widths.size() / 2, widths.end());
        const double max_gap = 0.6 * widths[widths.size() / 2];

        WordBox cur;
        for (Component& c : l.comps) {
            if (!cur.components.empty() && c.bbox.x - cur.bbox.right() > max_gap) {
                words.push_back(std::move(cur));
                cur = {};
            }
            cur.bbox = bounding_union(cur.bbox, c.bbox);
            cur.components.push_back(std::move(c));
        }
        if (!cur.components.empty()) words.push_back(std::move(cur));
    }
    std::stable_sort(words.begin(), words.end(), [](const WordBox& a, const WordBox& b) {
        return a.bbox.y != b.bbox.y ? a.bbox.y < b.bbox.y : a.bbox.x < b.bbox.x;
    });
    return words;
}

/// Crop box enlarged by `pad` on every side, clipped to the image.
inline Box padded(const Box& box, int pad, const Box& bounds)
{
    return intersection({box.x - pad, box.y - pad, box.w + 2 * pad, box.h + 2 * pad}, bounds);
}

/// Context margin used when cropping a word so strokes stay the minority class.
inline int crop_margin(const Box& box)
{
    return std::max(2, box.h / 4);
}

// ---------------------------------------------------------------------------
// Recognition

struct RecognizedChar {
    char character = '?';
    double distance = 0.0;
};

/// Nearest atlas glyph over all characters and styles.
inline RecognizedChar nearest_character(const GlyphBitmap& glyph, const FontAtlas& atlas)
{
    const GlyphCode query(glyph, atlas.tolerance());
    RecognizedChar best{'?', std::numeric_limits<double>::infinity()};
    for (const AtlasEntry& e : atlas.entries()) {
        const double d = pseudo_hamming(query, e.code);
        if (d < best.distance) best = {e.character, d};
    }
    return best;
}

inline std::string recognize_components(std::span<const Component> comps, const FontAtlas& atlas,
                                        double* mean_distance = nullptr)
{
    std::string word;
    double total = 0.0;
    for (const Component& c : comps) {
        const RecognizedChar r = nearest_character(normalize_glyph(c, '\0', atlas.glyph_size()), atlas);
        word += r.character;
        total += r.distance;
    }
    if (mean_distance) *mean_distance = comps.empty() ? 0.0 : total / comps.size();
    return word;
}

/// Baseline recognizer: per-component nearest atlas glyph, left to right.
inline std::string recognize_word(const RasterImage& crop, const FontAtlas& atlas)
{
    const std::vector<Component> comps = character_components(crop);
    require(!comps.empty(), "no components in crop");
    return recognize_components(comps, atlas);
}

// ---------------------------------------------------------------------------
// Detection

class WordDetector {
public:
    virtual ~WordDetector() = default;
    /// Regions for one image. Must be safe to call concurrently.
    virtual std::vector<TextRegion> detect(const RasterImage& img, std::string_view image_id) const = 0;
};

/// Geometric word finder plus the nearest-glyph recognizer.
class BaselineDetector : public WordDetector {
public:
    explicit BaselineDetector(const FontAtlas& atlas) : atlas_(&atlas) {}

    std::vector<TextRegion> detect(const RasterImage& img, std::string_view) const override
    {
        std::vector<TextRegion> out;
        for (const WordBox& wb : find_word_boxes(img)) {
            double mean = 0.0;
            const std::vector<Component> chars = merge_stacked(wb.components);
            std::string word = recognize_components(chars, *atlas_, &mean);
            const double area = static_cast<double>(atlas_->glyph_size()) * atlas_->glyph_size();
            out.push_back({wb.bbox, std::move(word), std::clamp(1.0 - mean / area, 0.0, 1.0)});
        }
        return out;
    }

private:
    const FontAtlas* atlas_;
};

/// Pre-computed detections (e.g. from an external deep detector), keyed by
/// record id. Boxes are clipped to the image; empty boxes or words dropped.
class ExternalBoxDetector : public WordDetector {
public:
    explicit ExternalBoxDetector(std::map<std::string, std::vector<TextRegion>> boxes) : boxes_(std::move(boxes)) {}

    std::vector<TextRegion> detect(const RasterImage& img, std::string_view image_id) const override
    {
        std::vector<TextRegion> out;
        const auto it = boxes_.find(std::string(image_id));
        if (it == boxes_.end()) return out;
        for (TextRegion r : it->second) {
            r.bbox = intersection(r.bbox, img.bounds());
            if (!r.bbox.empty() && !r.word.empty()) out.push_back(std::move(r));
        }
        return out;
    }

private:
    std::map<std::string, std::vector<TextRegion>> boxes_;
};

inline std::vector<TextRegion> detect_words(const RasterImage& img, const WordDetector& detector,
                                            std::string_view image_id = {})
{
    require(!img.empty(), "empty image");
    return detector.detect(img, image_id);
}

// ---------------------------------------------------------------------------
// Character segmentation

/// Segments a title crop into character components and labels them with
/// the characters of `word`. Equal counts align 1:1; otherwise components
/// and characters are paired greedily by proportional x-position, keeping
/// left-to-right order, and unpaired characters are dropped.
inline std::vector<LabeledComponent> segment_characters(const RasterImage& crop, std::string_view word,
                                                        int glyph_size = kGlyphSize)
{
    require(!word.empty(), "empty word");
    const std::vector<Component> comps = character_components(crop);
    require(!comps.empty(), "zero components in title crop");

    const std::size_t m = comps.size(), n = word.size();
    std::vector<std::ptrdiff_t> char_of(m, -1);
    if (m == n) {
        for (std::size_t j = 0; j < m; ++j) char_of[j] = static_cast<std::ptrdiff_t>(j);
    } else {
        const double x0 = comps.front().bbox.x;
        int x1 = 0;
        for (const Component& c : comps) x1 = std::max(x1, c.bbox.right());
        const double span = std::max(1.0, x1 - x0);
        struct Pair {
            double cost;
            std::size_t comp, ch;
        };
        std::vector<Pair> pairs;
        for (std::size_t j = 0; j < m; ++j) {
            const double r = (comps[j].bbox.x + comps[j].bbox.w / 2.0 - x0) / span;
            for (std::size_t i = 0; i < n; ++i) pairs.push_back({std::abs(r - (i + 0.5) / n), j, i});
        }
        std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.cost != b.cost) return a.cost < b.cost;
            return a.comp != b.comp ? a.comp < b.comp : a.ch < b.ch;
        });
        std::vector<bool> ch_used(n);
        for (const Pair& p : pairs) {
            if (char_of[p.comp] >= 0 || ch_used[p.ch]) continue;
            bool ordered = true;
            for (std::size_t j = 0; j < m && ordered; ++j) {
                if (char_of[j] < 0) continue;
                const auto c = static_cast<std::size_t>(char_of[j]);
                ordered = (j < p.comp) == (c < p.ch);
            }
            if (!ordered) continue;
            char_of[p.comp] = static_cast<std::ptrdiff_t>(p.ch);
            ch_used[p.ch] = true;
        }
    }

    std::vector<LabeledComponent> out;
    for (std::size_t j = 0; j < m; ++j) {
        if (char_of[j] < 0) continue;
        const char label = word[static_cast<std::size_t>(char_of[j])];
        out.push_back({normalize_glyph(comps[j], label, glyph_size), j, comps[j].bbox});
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSONL inputs

namespace detail {

template <class F>
void for_each_jsonl(const std::filesystem::path& path, F&& f)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            f(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(fmt::format("{}:{}: {}", path.string(), n, e.what()));
        } catch (const Error& e) {
            throw Error(fmt::format("{}:{}: {}", path.string(), n, e.what()));
        }
    }
}

} // namespace detail

inline BookRecord parse_book_record(const nlohmann::json& j)
{
    BookRecord r{j.at("id").get<std::string>(), j.at("title").get<std::string>(), j.at("genre").get<std::string>(),
                 j.at("image").get<std::string>()};
    require(!r.title.empty(), "book title is empty");
    require(!r.genre.empty(), "book genre is empty");
    return r;
}

inline nlohmann::json to_json(const BookRecord& r)
{
    return {{"id", r.id}, {"title", r.title}, {"genre", r.genre}, {"image", r.image}};
}

inline std::vector<BookRecord> read_book_records(const std::filesystem::path& path)
{
    std::vector<BookRecord> out;
    detail::for_each_jsonl(path, [&](const nlohmann::json& j) { out.push_back(parse_book_record(j)); });
    return out;
}

/// `{"id","boxes":[{"x","y","w","h","word"}]}` per line.
inline std::map<std::string, std::vector<TextRegion>> read_detections(const std::filesystem::path& path)
{
    std::map<std::string, std::vector<TextRegion>> out;
    detail::for_each_jsonl(path, [&](const nlohmann::json& j) {
        auto& list = out[j.at("id").get<std::string>()];
        for (const auto& b : j.at("boxes")) {
            TextRegion r;
            r.bbox = {b.at("x").get<int>(), b.at("y").get<int>(), b.at("w").get<int>(), b.at("h").get<int>()};
            r.word = b.at("word").get<std::string>();
            r.confidence = b.value("confidence", 1.0);
            list.push_back(std::move(r));
        }
    });
    return out;
}

} // namespace fontstat
