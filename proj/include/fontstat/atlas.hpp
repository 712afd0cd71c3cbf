#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "fontstat/csv.hpp"
#include "fontstat/glyph.hpp"
#include "fontstat/image_io.hpp"

namespace fontstat {

/// Ordered, closed set of style category names. Style ids are 0-based
/// positions in this list; CSV/JSON outputs use the names.
class StyleTaxonomy {
public:
    static constexpr std::size_t kBookStyles = 6;
    static constexpr std::size_t kAdStyles = 9;

    static StyleTaxonomy books()
    {
        return StyleTaxonomy({"Serif", "SansSerif", "Hybrid", "Script", "HistoricalScript", "Fancy"},
                             kBookStyles);
    }

    static std::vector<std::string> default_ad_names()
    {
        return {"Serif",  "SansSerif", "Rounded", "Calligraphy", "Handwriting",
                "Pop",    "Display",   "Retro",   "Monospace"};
    }

    /// Ad taxonomy: names are configuration, the count is fixed at nine.
    static StyleTaxonomy ads(std::vector<std::string> names = default_ad_names())
    {
        return StyleTaxonomy(std::move(names), kAdStyles);
    }

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t id) const { return names_.at(id); }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<std::size_t> find(std::string_view name) const
    {
        const auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - names_.begin());
    }

private:
    StyleTaxonomy(std::vector<std::string> names, std::size_t expected) : names_(std::move(names))
    {
        require(names_.size() == expected,
                fmt::format("style taxonomy needs exactly {} names, got {}", expected, names_.size()));
        auto sorted = names_;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                "duplicate style name in taxonomy");
    }

    std::vector<std::string> names_;
};

struct AtlasEntry {
    std::size_t style = 0;
    std::string font;
    char character = '\0';
    GlyphBitmap glyph;
    GlyphCode code;
    /// The glyph cell as stored on disk, used by the synthetic renderer.
    BinaryMask source;
};

/// Style-labeled reference glyphs. Immutable after construction.
class FontAtlas {
public:
    struct StyleGroup {
        std::size_t style = 0;
        std::vector<const AtlasEntry*> entries;
    };

    FontAtlas(StyleTaxonomy taxonomy, std::vector<AtlasEntry> entries, double tolerance)
        : taxonomy_(std::move(taxonomy)), entries_(std::move(entries)), tolerance_(tolerance)
    {
        std::sort(entries_.begin(), entries_.end(), [](const AtlasEntry& a, const AtlasEntry& b) {
            return std::tie(a.style, a.font, a.character) < std::tie(b.style, b.font, b.character);
        });
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const AtlasEntry& e = entries_[i];
            require(e.style < taxonomy_.size(), "atlas entry with style outside the taxonomy");
            require(e.glyph.mask.count() > 0, "atlas entry with empty glyph");
            if (i > 0 && entries_[i - 1].style == e.style && entries_[i - 1].font == e.font &&
                entries_[i - 1].character == e.character)
                throw Error("duplicate atlas entry " + e.font + "/" + std::string(1, e.character));
            by_char_[e.character].push_back(i);
        }
        for (const AtlasEntry& e : entries_) {
            auto [it, inserted] = font_style_.emplace(e.font, e.style);
            require(it->second == e.style, "font '" + e.font + "' listed under two styles");
        }
    }

    const StyleTaxonomy& taxonomy() const { return taxonomy_; }
    const std::vector<AtlasEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    double tolerance() const { return tolerance_; }
    int glyph_size() const { return entries_.empty() ? kGlyphSize : entries_.front().glyph.size(); }

    bool has_char(char c) const { return by_char_.count(c) > 0; }

    /// Entries for `c` (case-sensitive), grouped by style in id order.
    std::vector<StyleGroup> glyphs_for_char(char c) const
    {
        std::vector<StyleGroup> groups;
        const auto it = by_char_.find(c);
        if (it == by_char_.end()) return groups;
        for (std::size_t i : it->second) {
            const AtlasEntry& e = entries_[i];
            if (groups.empty() || groups.back().style != e.style) groups.push_back({e.style, {}});
            groups.back().entries.push_back(&e);
        }
        return groups;
    }

    const AtlasEntry* find(std::string_view font, char c) const
    {
        const auto it = by_char_.find(c);
        if (it == by_char_.end()) return nullptr;
        for (std::size_t i : it->second)
            if (entries_[i].font == font) return &entries_[i];
        return nullptr;
    }

    /// Font names of a style, sorted.
    std::vector<std::string> fonts(std::size_t style) const
    {
        std::vector<std::string> out;
        for (const auto& [font, s] : font_style_)
            if (s == style) out.push_back(font);
        return out;
    }

    std::optional<std::size_t> style_of_font(std::string_view font) const
    {
        const auto it = font_style_.find(std::string(font));
        if (it == font_style_.end()) return std::nullopt;
        return it->second;
    }

private:
    StyleTaxonomy taxonomy_;
    std::vector<AtlasEntry> entries_;
    double tolerance_;
    std::map<char, std::vector<std::size_t>> by_char_;
    std::map<std::string, std::size_t> font_style_;
};

struct AtlasOptions {
    int glyph_size = kGlyphSize;
    double tolerance = kDefaultTolerance;
};

namespace detail {

inline AtlasEntry make_entry(std::size_t style, std::string font, char c, BinaryMask source,
                             const AtlasOptions& opt)
{
    require(source.count() > 0, "empty glyph image for " + font + "/" + std::string(1, c));
    AtlasEntry e;
    e.style = style;
    e.font = std::move(font);
    e.character = c;
    e.glyph = normalize_glyph(source, c, opt.glyph_size);
    e.code = GlyphCode(e.glyph, opt.tolerance);
    e.source = std::move(source);
    return e;
}

inline char char_from_stem(const std::filesystem::path& file)
{
    const std::string stem = file.stem().string();
    require(stem.size() == 1, "glyph file name must be a single character: " + file.string());
    return stem[0];
}

} // namespace detail

/// Loads `<dir>/<style>/<font>/<char>.png`. When `<dir>/manifest.json`
/// exists it is used instead of a directory scan.
inline FontAtlas load_atlas(const std::filesystem::path& dir, const AtlasOptions& opt = {})
{
    namespace fs = std::filesystem;
    const StyleTaxonomy taxonomy = StyleTaxonomy::books();
    require(fs::is_directory(dir), "atlas directory not found: " + dir.string());

    std::vector<AtlasEntry> entries;
    std::map<std::size_t, std::size_t> per_style;
    auto style_id = [&](const std::string& name) {
        const auto id = taxonomy.find(name);
        require(id.has_value(), "unknown style '" + name + "' in atlas");
        return *id;
    };

    const fs::path manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        std::ifstream in(manifest);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw Error("malformed atlas manifest: " + std::string(e.what()));
        }
        for (const auto& g : doc.at("glyphs")) {
            const std::size_t style = style_id(g.at("style").get<std::string>());
            const std::string ch = g.at("char").get<std::string>();
            require(ch.size() == 1, "manifest char must be a single character");
            entries.push_back(detail::make_entry(style, g.at("font").get<std::string>(), ch[0],
                                                 read_mask(dir / g.at("path").get<std::string>()), opt));
            ++per_style[style];
        }
    } else {
        std::vector<fs::path> style_dirs;
        for (const auto& d : fs::directory_iterator(dir))
            if (d.is_directory()) style_dirs.push_back(d.path());
        std::sort(style_dirs.begin(), style_dirs.end());
        for (const fs::path& sd : style_dirs) {
            const std::size_t style = style_id(sd.filename().string());
            per_style[style];
            std::vector<fs::path> font_dirs;
            for (const auto& d : fs::directory_iterator(sd))
                if (d.is_directory()) font_dirs.push_back(d.path());
            std::sort(font_dirs.begin(), font_dirs.end());
            for (const fs::path& fd : font_dirs) {
                std::vector<fs::path> files;
                for (const auto& f : fs::directory_iterator(fd))
                    if (f.is_regular_file() && f.path().extension() == ".png") files.push_back(f.path());
                std::sort(files.begin(), files.end());
                for (const fs::path& f : files) {
                    entries.push_back(detail::make_entry(style, fd.filename().string(),
                                                         detail::char_from_stem(f), read_mask(f), opt));
                    ++per_style[style];
                }
            }
        }
    }
    for (const auto& [style, count] : per_style)
        require(count > 0, "style '" + taxonomy.name(style) + "' has no glyphs");
    require(!entries.empty(), "atlas is empty: " + dir.string());
    return FontAtlas(taxonomy, std::move(entries), opt.tolerance);
}

/// Canonical byte serialization (entry order, labels and normalized bits).
inline std::string serialize_atlas(const FontAtlas& atlas)
{
    std::string out;
    for (const AtlasEntry& e : atlas.entries()) {
        out += fmt::format("{}|{}|{}|{}\n", atlas.taxonomy().name(e.style), e.font, e.character,
                           e.glyph.size());
        for (std::uint8_t v : e.glyph.mask.data()) out += v ? '1' : '0';
        out += '\n';
    }
    return out;
}

/// Font name -> ad style id. Names are matched case-insensitively with
/// whitespace trimmed and collapsed; anything absent is "unclear".
class FontNameLookup {
public:
    explicit FontNameLookup(StyleTaxonomy taxonomy = StyleTaxonomy::ads()) : taxonomy_(std::move(taxonomy)) {}

    static std::string normalize(std::string_view name)
    {
        std::string out;
        bool pending_space = false;
        for (char c : name) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                pending_space = !out.empty();
                continue;
            }
            if (pending_space) out += ' ';
            pending_space = false;
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        return out;
    }

    void add(std::string_view name, std::size_t style)
    {
        require(style < taxonomy_.size(), "ad style id out of range");
        const std::string key = normalize(name);
        require(!key.empty(), "empty font name in lookup");
        map_[key] = style;
    }

    std::optional<std::size_t> lookup_style(std::string_view name) const
    {
        const auto it = map_.find(normalize(name));
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }

    const StyleTaxonomy& taxonomy() const { return taxonomy_; }
    std::size_t size() const { return map_.size(); }

private:
    StyleTaxonomy taxonomy_;
    std::unordered_map<std::string, std::size_t> map_;
};

/// Parses `font_name,style` rows. The style column is a taxonomy name or a
/// 1-based id. A header row `font_name,style` is skipped.
inline FontNameLookup parse_font_lookup(std::istream& in, StyleTaxonomy taxonomy = StyleTaxonomy::ads())
{
    FontNameLookup lookup(std::move(taxonomy));
    std::size_t line = 0;
    for (const auto& row : csv::read_all(in)) {
        ++line;
        if (line == 1 && row.size() == 2 && FontNameLookup::normalize(row[0]) == "font_name") continue;
        require(row.size() == 2, fmt::format("lookup line {}: expected 2 columns", line));
        const std::string style = FontNameLookup::normalize(row[1]);
        std::optional<std::size_t> id;
        for (std::size_t s = 0; s < lookup.taxonomy().size(); ++s)
            if (FontNameLookup::normalize(lookup.taxonomy().name(s)) == style) id = s;
        if (!id && !style.empty() && std::all_of(style.begin(), style.end(), ::isdigit)) {
            const long long n = csv::to_integer(style);
            if (n >= 1 && n <= static_cast<long long>(lookup.taxonomy().size())) id = n - 1;
        }
        require(id.has_value(), fmt::format("lookup line {}: unknown style '{}'", line, row[1]));
        lookup.add(row[0], *id);
    }
    return lookup;
}

inline FontNameLookup load_font_lookup(const std::filesystem::path& path,
                                       StyleTaxonomy taxonomy = StyleTaxonomy::ads())
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open font lookup " + path.string());
    return parse_font_lookup(in, std::move(taxonomy));
}

} // namespace fontstat
