#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fontstat/atlas.hpp"
#include "fontstat/color_space.hpp"
#include "fontstat/extraction.hpp"
#include "fontstat/image_io.hpp"
#include "fontstat/parallel.hpp"

namespace fontstat {

inline constexpr double kMinLegibleDeltaE = 20.0;

struct NoiseOptions {
    int blur_radius = 0;  ///< box blur radius in pixels, 0 = off
    int jpeg_quality = 0; ///< JPEG re-encode quality, 0 = off
};

struct SynthSpec {
    std::string id;
    std::string title;
    std::size_t style = 0;
    std::string font;
    LabColor text_color;
    LabColor background;
    std::string genre;
    std::uint64_t seed = 0;
    double scale = 1.0;
    /// gap between glyph ink boxes at scale 1
    int tracking = 5;
    /// author line; generated from the seed when empty
    std::string author;
    NoiseOptions noise;
};

struct CharBox {
    Box bbox;
    char character = '\0';
};

struct WordLabel {
    Box bbox;
    std::string word;
};

struct SynthCover {
    RasterImage image;
    BookRecord record;
    std::vector<CharBox> char_boxes;   ///< title characters
    std::vector<WordLabel> title_words;
    std::vector<WordLabel> other_words; ///< author line
    Rgb text_rgb;
};

namespace detail {

inline const std::vector<std::string>& title_words()
{
    static const std::vector<std::string> words = {
        "Personality", "Garden",   "Winter",  "Ocean",    "Shadow",  "Empire",   "River",   "Market",
        "Secret",      "Journey",  "Silver",  "Harbor",   "Quantum", "Kingdom",  "Mountain", "Memory",
        "Forest",      "Castle",   "Thunder", "Planet",   "Summer",  "Velvet",   "Horizon", "Wisdom",
        "Lantern",     "Crystal",  "Desert",  "Meadow",   "Voyage",  "Legacy",   "Storm",   "Orchard",
        "Pattern",     "Beyond",   "Cipher",  "Harvest",  "Monarch", "Nebula",   "Pioneer", "Rhythm",
        "Spirit",      "Tangent",  "Utopia",  "Venture",  "Whisper", "Zenith",   "Anchor",  "Bridge",
        "Canyon",      "Dynamo",   "Eclipse", "Falcon",   "Glacier", "Heritage", "Island",  "Jungle",
        "Kernel",      "Labyrinth", "Mosaic", "Number",   "Oracle",  "Paradox",  "Quest",   "Rocket",
        "Saga",        "Timber",   "Unity",   "Vector",   "Wonder",  "Yonder",   "Atlas",   "Budget",
        "Chemistry",   "Design",   "Finance", "Grammar",  "History", "Justice",  "Logic",   "Method",
        "Nature",      "Physics",
    };
    return words;
}

inline const std::vector<std::string>& author_words()
{
    static const std::vector<std::string> words = {
        "JOHN", "MARY", "KENJI", "AKIKO", "DAVID", "ELENA", "OMAR", "PRIYA", "LUCAS", "SOFIA",
        "SMITH", "TANAKA", "GARCIA", "MULLER", "ROSSI", "KOWALSKI", "NGUYEN", "SATO", "DUBOIS", "STERN",
    };
    return words;
}

inline BinaryMask scale_mask(const BinaryMask& src, double scale)
{
    const int w = std::max(1, static_cast<int>(std::lround(src.width() * scale)));
    const int h = std::max(1, static_cast<int>(std::lround(src.height() * scale)));
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        const int sy = std::min(static_cast<int>((y + 0.5) * src.height() / h), src.height() - 1);
        for (int x = 0; x < w; ++x) {
            const int sx = std::min(static_cast<int>((x + 0.5) * src.width() / w), src.width() - 1);
            out.at(x, y) = src.at(sx, sy);
        }
    }
    return out;
}

inline Box ink_box(const BinaryMask& m)
{
    int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.test(x, y)) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

struct PlacedGlyph {
    BinaryMask mask;
    char character;
    int x = 0; ///< cell origin relative to line start
};

struct LineLayout {
    std::vector<std::vector<PlacedGlyph>> words;
    int width = 0;
    int height = 0;
};

inline LineLayout layout_line(const FontAtlas& atlas, const std::string& font, const std::vector<std::string>& words,
                              double scale, int tracking)
{
    LineLayout line;
    const int track = std::max(1, static_cast<int>(std::lround(tracking * scale)));
    int x = 0;
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::vector<PlacedGlyph> placed;
        for (char c : words[w]) {
            const AtlasEntry* e = atlas.find(font, c);
            if (!e) throw Error(fmt::format("missing glyph '{}' in font {}", c, font));
            BinaryMask m = scale_mask(e->source, scale);
            placed.push_back({m, c, x});
            x += m.width() + track;
            line.height = std::max(line.height, m.height());
        }
        x -= track;
        line.words.push_back(std::move(placed));
        if (w + 1 < words.size()) x += std::max(4 * track, static_cast<int>(std::lround(0.55 * line.height)));
    }
    line.width = x;
    return line;
}

inline void box_blur(RasterImage& img, int radius)
{
    if (radius <= 0) return;
    const RasterImage src = img;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            int r = 0, g = 0, b = 0, n = 0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (!src.contains(x + dx, y + dy)) continue;
                    const Rgb c = src.at(x + dx, y + dy);
                    r += c.r;
                    g += c.g;
                    b += c.b;
                    ++n;
                }
            img.at(x, y) = {static_cast<std::uint8_t>((r + n / 2) / n), static_cast<std::uint8_t>((g + n / 2) / n),
                            static_cast<std::uint8_t>((b + n / 2) / n)};
        }
}

} // namespace detail

/// Renders a flat-background cover with the title line(s) in `spec.font`
/// and a smaller author line in a sans font, returning exact glyph boxes.
inline SynthCover render_cover(const SynthSpec& spec, const FontAtlas& atlas)
{
    require(delta_e76(spec.text_color, spec.background) >= kMinLegibleDeltaE,
            fmt::format("text/background contrast below dE {}", kMinLegibleDeltaE));
    const auto font_style = atlas.style_of_font(spec.font);
    require(font_style.has_value(), "unknown font '" + spec.font + "'");
    require(*font_style == spec.style, "font '" + spec.font + "' does not belong to the declared style");
    require(spec.scale > 0.0, "scale must be positive");
    const std::vector<std::string> words = tokenize(spec.title);
    require(!words.empty(), "empty title");

    std::mt19937_64 rng(spec.seed);
    std::string author = spec.author;
    if (author.empty()) {
        const auto& pool = detail::author_words();
        author = pool[rng() % 10] + " " + pool[10 + rng() % 10];
    }
    std::string author_font = "DejaVuSans";
    if (!atlas.style_of_font(author_font)) author_font = atlas.entries().front().font;

    // wrap title words into lines no wider than max_line
    constexpr int max_line = 640;
    std::vector<detail::LineLayout> lines;
    std::vector<std::vector<std::string>> line_words;
    std::vector<std::string> current;
    for (const std::string& w : words) {
        current.push_back(w);
        if (current.size() > 1 &&
            detail::layout_line(atlas, spec.font, current, spec.scale, spec.tracking).width > max_line) {
            current.pop_back();
            line_words.push_back(current);
            current = {w};
        }
    }
    line_words.push_back(current);
    for (const auto& lw : line_words) lines.push_back(detail::layout_line(atlas, spec.font, lw, spec.scale, spec.tracking));
    const detail::LineLayout author_line =
        detail::layout_line(atlas, author_font, tokenize(author), 0.4, spec.tracking);

    int content_w = author_line.width;
    int title_h = 0;
    for (const auto& l : lines) {
        content_w = std::max(content_w, l.width);
        title_h += l.height;
    }
    const int line_gap = static_cast<int>(std::lround(12 * spec.scale));
    title_h += line_gap * static_cast<int>(lines.size() - 1);
    const int margin = 40 + static_cast<int>(rng() % 20);
    const int width = std::max(360, content_w + 2 * margin);
    const int height = std::max(width * 3 / 2, title_h + author_line.height + 200);

    SynthCover cover;
    cover.text_rgb = lab_to_rgb(spec.text_color);
    cover.image = RasterImage(width, height, lab_to_rgb(spec.background));

    auto stamp = [&](const detail::LineLayout& l, int x0, int y0, std::vector<WordLabel>& labels,
                     std::vector<CharBox>* chars, const std::vector<std::string>& text) {
        for (std::size_t w = 0; w < l.words.size(); ++w) {
            Box word_box;
            for (const auto& g : l.words[w]) {
                const int gx = x0 + g.x, gy = y0;
                for (int y = 0; y < g.mask.height(); ++y)
                    for (int x = 0; x < g.mask.width(); ++x)
                        if (g.mask.test(x, y)) cover.image.at(gx + x, gy + y) = cover.text_rgb;
                Box ink = detail::ink_box(g.mask);
                ink.x += gx;
                ink.y += gy;
                word_box = bounding_union(word_box, ink);
                if (chars) chars->push_back({ink, g.character});
            }
            labels.push_back({word_box, text[w]});
        }
    };

    const int free_y = height - title_h - author_line.height - 120;
    int y = 60 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, free_y / 2)));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int x = (width - lines[i].width) / 2;
        stamp(lines[i], x, y, cover.title_words, &cover.char_boxes, line_words[i]);
        y += lines[i].height + line_gap;
    }
    stamp(author_line, (width - author_line.width) / 2, height - author_line.height - 40, cover.other_words, nullptr,
          tokenize(author));

    detail::box_blur(cover.image, spec.noise.blur_radius);
    if (spec.noise.jpeg_quality > 0) cover.image = jpeg_roundtrip(cover.image, spec.noise.jpeg_quality);

    cover.record = {spec.id, spec.title, spec.genre, "images/" + spec.id + ".png"};
    return cover;
}

// ---------------------------------------------------------------------------
// Corpus profiles

struct WeightedColor {
    LabColor color;
    double weight = 1.0;
};

struct GenreProfile {
    std::string name;
    std::vector<double> styles; ///< categorical weights indexed by style id
    std::vector<WeightedColor> text_colors;
    std::vector<LabColor> backgrounds;
};

struct CorpusProfile {
    std::vector<GenreProfile> genres;
    double scale_min = 1.0;
    double scale_max = 1.0;
    int tracking = 5;
    NoiseOptions noise;
};

inline std::vector<LabColor> default_backgrounds()
{
    return {rgb_to_lab({250, 248, 240}), rgb_to_lab({20, 24, 38}), rgb_to_lab({236, 220, 190}),
            rgb_to_lab({60, 90, 70}),    rgb_to_lab({200, 210, 225}), rgb_to_lab({90, 30, 40})};
}

/// JSON profile:
/// {"genres":[{"name":..., "styles":{"SansSerif":1.0},
///             "text_colors":[{"lab":[L,a,b],"weight":w} | {"rgb":[r,g,b],"weight":w}],
///             "backgrounds":[[L,a,b],...]}],
///  "scale":[min,max], "tracking":px, "noise":{"blur":r,"jpeg_quality":q}}
inline CorpusProfile parse_profile(const nlohmann::json& j, const StyleTaxonomy& taxonomy = StyleTaxonomy::books())
{
    CorpusProfile p;
    auto lab_of = [](const nlohmann::json& c) -> LabColor {
        if (c.contains("rgb")) {
            const auto& v = c.at("rgb");
            return rgb_to_lab({static_cast<std::uint8_t>(v.at(0).get<int>()),
                               static_cast<std::uint8_t>(v.at(1).get<int>()),
                               static_cast<std::uint8_t>(v.at(2).get<int>())});
        }
        const auto& v = c.contains("lab") ? c.at("lab") : c;
        return {v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
    };
    try {
        for (const auto& g : j.at("genres")) {
            GenreProfile gp;
            gp.name = g.at("name").get<std::string>();
            require(!gp.name.empty(), "genre name is empty");
            gp.styles.assign(taxonomy.size(), 0.0);
            for (const auto& [name, w] : g.at("styles").items()) {
                const auto id = taxonomy.find(name);
                require(id.has_value(), "unknown style '" + name + "' in profile");
                gp.styles[*id] = w.get<double>();
            }
            double sw = 0.0;
            for (double w : gp.styles) {
                require(w >= 0.0, "negative style weight");
                sw += w;
            }
            require(sw > 0.0, "genre '" + gp.name + "' has no style weight");
            if (g.contains("text_colors"))
                for (const auto& c : g.at("text_colors")) gp.text_colors.push_back({lab_of(c), c.value("weight", 1.0)});
            if (gp.text_colors.empty()) gp.text_colors.push_back({rgb_to_lab({0, 0, 0}), 1.0});
            if (g.contains("backgrounds"))
                for (const auto& c : g.at("backgrounds")) gp.backgrounds.push_back(lab_of(c));
            if (gp.backgrounds.empty()) gp.backgrounds = default_backgrounds();
            p.genres.push_back(std::move(gp));
        }
        if (j.contains("scale")) {
            p.scale_min = j.at("scale").at(0).get<double>();
            p.scale_max = j.at("scale").at(1).get<double>();
        }
        p.tracking = j.value("tracking", p.tracking);
        if (j.contains("noise")) {
            p.noise.blur_radius = j.at("noise").value("blur", 0);
            p.noise.jpeg_quality = j.at("noise").value("jpeg_quality", 0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed profile: ") + e.what());
    }
    require(!p.genres.empty(), "profile has no genres");
    require(p.scale_min > 0.0 && p.scale_min <= p.scale_max, "invalid scale range");
    return p;
}

namespace detail {

template <class Rng>
std::size_t sample_categorical(Rng& rng, const std::vector<double>& weights)
{
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last = i;
        if (u < acc) return i;
    }
    return last;
}

inline bool font_covers(const FontAtlas& atlas, const std::string& font, const std::string& title)
{
    for (char c : title)
        if (!std::isspace(static_cast<unsigned char>(c)) && !atlas.find(font, c)) return false;
    return true;
}

} // namespace detail

/// Draws the spec of cover `index` from its genre profile. Uses an RNG
/// seeded with seed + index only, so specs do not depend on sampling order.
inline SynthSpec sample_spec(const CorpusProfile& profile, const GenreProfile& genre, const FontAtlas& atlas,
                             std::uint64_t seed, std::size_t index)
{
    std::mt19937_64 rng(seed + index);
    SynthSpec spec;
    spec.id = fmt::format("book{:05d}", index);
    spec.genre = genre.name;
    spec.seed = rng();
    spec.style = detail::sample_categorical(rng, genre.styles);

    const auto& pool = detail::title_words();
    const std::size_t nwords = 1 + rng() % 2;
    std::string title;
    for (std::size_t w = 0; w < nwords; ++w) {
        if (w) title += ' ';
        title += pool[rng() % pool.size()];
    }
    std::vector<std::string> fonts;
    for (const std::string& f : atlas.fonts(spec.style))
        if (detail::font_covers(atlas, f, title)) fonts.push_back(f);
    if (fonts.empty()) {
        for (char& c : title) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        for (const std::string& f : atlas.fonts(spec.style))
            if (detail::font_covers(atlas, f, title)) fonts.push_back(f);
    }
    require(!fonts.empty(), "no font of style " + atlas.taxonomy().name(spec.style) + " covers the title");
    spec.title = title;
    spec.font = fonts[rng() % fonts.size()];

    std::vector<double> cw;
    for (const auto& c : genre.text_colors) cw.push_back(c.weight);
    spec.text_color = genre.text_colors[detail::sample_categorical(rng, cw)].color;
    const std::size_t start = rng() % genre.backgrounds.size();
    bool found = false;
    for (std::size_t k = 0; k < genre.backgrounds.size() && !found; ++k) {
        const LabColor& bg = genre.backgrounds[(start + k) % genre.backgrounds.size()];
        if (delta_e76(bg, spec.text_color) >= kMinLegibleDeltaE + 10.0) {
            spec.background = bg;
            found = true;
        }
    }
    if (!found) spec.background = spec.text_color.L > 50 ? rgb_to_lab({0, 0, 0}) : rgb_to_lab({255, 255, 255});
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    spec.scale = profile.scale_min + u * (profile.scale_max - profile.scale_min);
    spec.tracking = profile.tracking;
    spec.noise = profile.noise;
    return spec;
}

/// All specs of a corpus: n covers per genre, genres in profile order.
inline std::vector<SynthSpec> corpus_specs(const CorpusProfile& profile, const FontAtlas& atlas, std::size_t n,
                                           std::uint64_t seed)
{
    std::vector<SynthSpec> specs;
    for (const GenreProfile& g : profile.genres)
        for (std::size_t i = 0; i < n; ++i) specs.push_back(sample_spec(profile, g, atlas, seed, specs.size()));
    return specs;
}

inline nlohmann::json ground_truth_json(const SynthSpec& spec, const SynthCover& cover, const FontAtlas& atlas)
{
    nlohmann::json boxes = nlohmann::json::array(), title_boxes = nlohmann::json::array(),
                   chars = nlohmann::json::array();
    auto box_json = [](const Box& b, const std::string& word) {
        return nlohmann::json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"word", word}};
    };
    for (const auto& w : cover.title_words) {
        boxes.push_back(box_json(w.bbox, w.word));
        title_boxes.push_back(box_json(w.bbox, w.word));
    }
    for (const auto& w : cover.other_words) boxes.push_back(box_json(w.bbox, w.word));
    for (const auto& c : cover.char_boxes) chars.push_back(box_json(c.bbox, std::string(1, c.character)));
    const LabColor realized = rgb_to_lab(cover.text_rgb);
    return {{"id", spec.id},
            {"genre", spec.genre},
            {"title", spec.title},
            {"style", atlas.taxonomy().name(spec.style)},
            {"font", spec.font},
            {"text_lab", {realized.L, realized.a, realized.b}},
            {"text_rgb", {cover.text_rgb.r, cover.text_rgb.g, cover.text_rgb.b}},
            {"background_lab", {spec.background.L, spec.background.a, spec.background.b}},
            {"scale", spec.scale},
            {"boxes", boxes},
            {"title_boxes", title_boxes},
            {"char_boxes", chars}};
}

/// Writes images/, metadata.jsonl and ground_truth.jsonl under `out`.
/// The ground truth lines also carry a "boxes" array in the external
/// detections schema, so the file can be fed back as pre-computed boxes.
inline std::size_t generate_corpus(const CorpusProfile& profile, const FontAtlas& atlas, std::size_t n,
                                   std::uint64_t seed, const std::filesystem::path& out, std::size_t workers = 1)
{
    namespace fs = std::filesystem;
    fs::create_directories(out / "images");
    const std::vector<SynthSpec> specs = corpus_specs(profile, atlas, n, seed);
    std::vector<std::string> meta(specs.size()), truth(specs.size());
    parallel_for(specs.size(), workers, [&](std::size_t i) {
        const SynthCover cover = render_cover(specs[i], atlas);
        write_image(out / cover.record.image, cover.image);
        meta[i] = to_json(cover.record).dump();
        truth[i] = ground_truth_json(specs[i], cover, atlas).dump();
    });
    std::ofstream m(out / "metadata.jsonl"), t(out / "ground_truth.jsonl");
    if (!m || !t) throw Error("cannot write corpus metadata under " + out.string());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        m << meta[i] << '\n';
        t << truth[i] << '\n';
    }
    return specs.size();
}

} // namespace fontstat
