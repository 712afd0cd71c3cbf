#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "fontstat/analytics.hpp"
#include "fontstat/color.hpp"

namespace fontstat {

inline std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

namespace detail {

inline std::string svg_num(double v)
{
    return fmt::format("{:.6g}", v);
}

inline std::string hex_color(Rgb c)
{
    return fmt::format("#{:02x}{:02x}{:02x}", c.r, c.g, c.b);
}

} // namespace detail

/// Genre x category heat map: one row per genre, cell opacity equal to the
/// frequency, with a marginal bar chart of the corpus-wide distribution on
/// top. With a palette, cells are filled with the palette colors.
inline std::string emit_heatmap_svg(const FrequencyTable& table, const Palette* palette = nullptr,
                                    std::string_view title = {})
{
    using detail::svg_num;
    constexpr int cell = 28, bar_h = 80, header_h = 90, gap = 8;
    std::size_t longest = 5;
    for (const auto& g : table.genres) longest = std::max(longest, g.size());
    const int label_w = static_cast<int>(longest) * 7 + 16;
    const int cols = static_cast<int>(table.columns.size());
    const int rows = static_cast<int>(table.genres.size());
    const int top = 30 + bar_h + gap + header_h;
    const int width = label_w + cols * cell + 20;
    const int height = top + rows * cell + 20;

    auto fill_of = [&](std::size_t c) {
        if (palette && c < palette->size()) return detail::hex_color(lab_to_rgb(palette->centroids[c]));
        return std::string("#1f4e9c");
    };

    std::string s = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"11\">\n"
        "<rect width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
        width, height);
    if (!title.empty()) s += fmt::format("<text x=\"8\" y=\"18\" font-size=\"13\">{}</text>\n", xml_escape(title));

    // marginal bars
    const std::vector<double> overall = table.overall();
    const double peak = std::max(1e-12, *std::max_element(overall.begin(), overall.end()));
    s += "<g class=\"bars\">\n";
    for (int c = 0; c < cols; ++c) {
        const double h = bar_h * overall[c] / peak;
        s += fmt::format("<rect class=\"bar\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{} {}"
                         "</title></rect>\n",
                         label_w + c * cell + 3, svg_num(30 + bar_h - h), cell - 6, svg_num(h), fill_of(c),
                         xml_escape(table.columns[c]), svg_num(overall[c]));
    }
    s += "</g>\n<g class=\"columns\">\n";
    for (int c = 0; c < cols; ++c) {
        const int x = label_w + c * cell + cell / 2;
        const int y = top - 6;
        s += fmt::format("<text x=\"{0}\" y=\"{1}\" transform=\"rotate(-60 {0} {1})\">{2}</text>\n", x, y,
                         xml_escape(table.columns[c]));
    }
    s += "</g>\n<g class=\"grid\">\n";
    for (int r = 0; r < rows; ++r) {
        const int y = top + r * cell;
        s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", label_w - 6, y + cell / 2 + 4,
                         xml_escape(table.genres[r]));
        for (int c = 0; c < cols; ++c) {
            const double v = std::clamp(table.rows[r][c], 0.0, 1.0);
            s += fmt::format("<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" "
                             "fill-opacity=\"{}\"><title>{} / {}: {}</title></rect>\n",
                             label_w + c * cell, y, cell, cell, fill_of(c), svg_num(v), xml_escape(table.genres[r]),
                             xml_escape(table.columns[c]), svg_num(table.rows[r][c]));
        }
    }
    s += "</g>\n</svg>\n";
    return s;
}

/// Scatter plot of a 2-D genre embedding with labels.
inline std::string emit_scatter_svg(const Embedding2D& e, std::string_view title = {})
{
    using detail::svg_num;
    constexpr int size = 520, pad = 60;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    for (const auto& c : e.coords) {
        x0 = std::min(x0, c[0]);
        x1 = std::max(x1, c[0]);
        y0 = std::min(y0, c[1]);
        y1 = std::max(y1, c[1]);
    }
    const double span = std::max({x1 - x0, y1 - y0, 1e-12});
    auto px = [&](double x) { return pad + (x - x0) / span * (size - 2 * pad); };
    auto py = [&](double y) { return size - pad - (y - y0) / span * (size - 2 * pad); };

    std::string s = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\" "
        "font-family=\"sans-serif\" font-size=\"11\">\n"
        "<rect width=\"{0}\" height=\"{0}\" fill=\"#ffffff\"/>\n",
        size);
    if (!title.empty()) s += fmt::format("<text x=\"8\" y=\"18\" font-size=\"13\">{}</text>\n", xml_escape(title));
    s += fmt::format("<text x=\"8\" y=\"{}\" fill=\"#666666\">stress {}</text>\n", size - 8, svg_num(e.stress));
    s += "<g class=\"points\">\n";
    for (std::size_t i = 0; i < e.genres.size(); ++i) {
        const double x = px(e.coords[i][0]), y = py(e.coords[i][1]);
        s += fmt::format("<circle class=\"point\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#c0392b\"/>\n"
                         "<text x=\"{}\" y=\"{}\">{}</text>\n",
                         svg_num(x), svg_num(y), svg_num(x + 6), svg_num(y - 6), xml_escape(e.genres[i]));
    }
    s += "</g>\n</svg>\n";
    return s;
}

} // namespace fontstat
