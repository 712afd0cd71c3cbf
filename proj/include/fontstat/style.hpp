#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "fontstat/atlas.hpp"

namespace fontstat {

/// Probability distribution over the style categories of a taxonomy.
struct StyleProbabilities {
    std::vector<double> p;

    std::size_t size() const { return p.size(); }
    double operator[](std::size_t i) const { return p[i]; }

    std::size_t argmax() const
    {
        return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    }
};

/// Per-style k-NN vote. distances[s] lists the distances from the query to
/// every reference glyph of style s (empty when the style has none). Only the
/// K smallest per style take part. If any of those is zero the result is
/// uniform over the styles with a zero-distance match.
inline StyleProbabilities style_probabilities(std::span<const std::vector<double>> distances, int k)
{
    require(k >= 1, "K must be at least 1");
    const std::size_t n = distances.size();
    std::vector<std::vector<double>> nearest(n);
    bool any = false;
    for (std::size_t s = 0; s < n; ++s) {
        nearest[s] = distances[s];
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), nearest[s].size());
        std::partial_sort(nearest[s].begin(), nearest[s].begin() + take, nearest[s].end());
        nearest[s].resize(take);
        for (double d : nearest[s]) require(d >= 0.0, "negative glyph distance");
        any = any || take > 0;
    }
    require(any, "no reference glyphs to compare against");

    StyleProbabilities out{std::vector<double>(n, 0.0)};
    std::size_t zero_styles = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!nearest[s].empty() && nearest[s].front() == 0.0) {
            out.p[s] = 1.0;
            ++zero_styles;
        }
    }
    if (zero_styles > 0) {
        for (double& v : out.p) v /= static_cast<double>(zero_styles);
        return out;
    }

    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double votes = 0.0;
        for (double d : nearest[s]) votes += 1.0 / d;
        out.p[s] = votes;
        total += votes;
    }
    for (double& v : out.p) v /= total;
    return out;
}

/// Style probabilities of one character glyph against the atlas glyphs of
/// the same character.
inline StyleProbabilities classify_character(const GlyphBitmap& glyph, const FontAtlas& atlas, int k = 3)
{
    require(atlas.has_char(glyph.label),
            fmt::format("character '{}' is absent from the atlas", glyph.label));
    require(glyph.size() == atlas.glyph_size(), "glyph resolution does not match the atlas");
    const GlyphCode query(glyph, atlas.tolerance());
    std::vector<std::vector<double>> distances(atlas.taxonomy().size());
    for (const auto& group : atlas.glyphs_for_char(glyph.label))
        for (const AtlasEntry* e : group.entries) distances[group.style].push_back(pseudo_hamming(query, e->code));
    return style_probabilities(distances, k);
}

/// Arithmetic mean of per-character probabilities over a title; glyphs whose
/// character the atlas lacks are skipped.
inline StyleProbabilities title_style_usage(std::span<const GlyphBitmap> glyphs, const FontAtlas& atlas, int k = 3)
{
    StyleProbabilities mean{std::vector<double>(atlas.taxonomy().size(), 0.0)};
    std::size_t used = 0;
    for (const GlyphBitmap& g : glyphs) {
        if (!atlas.has_char(g.label)) continue;
        const StyleProbabilities p = classify_character(g, atlas, k);
        for (std::size_t s = 0; s < p.size(); ++s) mean.p[s] += p.p[s];
        ++used;
    }
    require(used > 0, "no classifiable components");
    for (double& v : mean.p) v /= static_cast<double>(used);
    return mean;
}

inline StyleProbabilities title_style_usage(std::span<const LabeledComponent> components, const FontAtlas& atlas,
                                            int k = 3)
{
    std::vector<GlyphBitmap> glyphs;
    glyphs.reserve(components.size());
    for (const LabeledComponent& c : components) glyphs.push_back(c.glyph);
    return title_style_usage(std::span<const GlyphBitmap>(glyphs), atlas, k);
}

} // namespace fontstat
