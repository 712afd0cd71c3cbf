#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "fontstat/raster.hpp"

namespace fontstat {

/// CIE L*a*b* under D65, computed from sRGB.
struct LabColor {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;

    friend bool operator==(const LabColor&, const LabColor&) = default;
};

/// CIE76 color difference: Euclidean distance in Lab.
inline double delta_e76(const LabColor& p, const LabColor& q)
{
    const double dl = p.L - q.L, da = p.a - q.a, db = p.b - q.b;
    return std::sqrt(dl * dl + da * da + db * db);
}

namespace detail {

// sRGB -> XYZ (D65). The reference white is the image of (1,1,1) under the
// same matrix so pure white lands exactly on a = b = 0.
inline constexpr std::array<double, 9> kRgbToXyz = {
    0.4124564, 0.3575761, 0.1804375,
    0.2126729, 0.7151522, 0.0721750,
    0.0193339, 0.1191920, 0.9503041,
};
inline constexpr double kWhiteX = 0.4124564 + 0.3575761 + 0.1804375;
inline constexpr double kWhiteY = 0.2126729 + 0.7151522 + 0.0721750;
inline constexpr double kWhiteZ = 0.0193339 + 0.1191920 + 0.9503041;

inline constexpr double kDelta = 6.0 / 29.0;

inline double srgb_to_linear(double c)
{
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double c)
{
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

inline double lab_f(double t)
{
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

inline double lab_f_inv(double t)
{
    return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

} // namespace detail

inline LabColor rgb_to_lab(Rgb rgb)
{
    using namespace detail;
    const double r = srgb_to_linear(rgb.r / 255.0);
    const double g = srgb_to_linear(rgb.g / 255.0);
    const double b = srgb_to_linear(rgb.b / 255.0);
    const auto& m = kRgbToXyz;
    const double x = m[0] * r + m[1] * g + m[2] * b;
    const double y = m[3] * r + m[4] * g + m[5] * b;
    const double z = m[6] * r + m[7] * g + m[8] * b;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return {std::clamp(116.0 * fy - 16.0, 0.0, 100.0), 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

/// Inverse conversion, clipped to the sRGB gamut and rounded.
inline Rgb lab_to_rgb(const LabColor& lab)
{
    using namespace detail;
    const double fy = (lab.L + 16.0) / 116.0;
    const double fx = fy + lab.a / 500.0;
    const double fz = fy - lab.b / 200.0;
    const double x = lab_f_inv(fx) * kWhiteX;
    const double y = lab_f_inv(fy) * kWhiteY;
    const double z = lab_f_inv(fz) * kWhiteZ;
    // inverse of kRgbToXyz
    const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
    auto to8 = [](double c) {
        const double v = linear_to_srgb(std::clamp(c, 0.0, 1.0)) * 255.0;
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    };
    return {to8(r), to8(g), to8(b)};
}

} // namespace fontstat
