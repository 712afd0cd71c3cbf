#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/imgcodecs.hpp>

#include "fontstat/raster.hpp"

namespace fontstat {

namespace detail {

inline cv::Mat to_bgr(const RasterImage& img)
{
    cv::Mat bgr(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width(); ++x) {
            const Rgb c = img.at(x, y);
            row[x] = {c.b, c.g, c.r};
        }
    }
    return bgr;
}

inline RasterImage from_bgr(const cv::Mat& bgr)
{
    RasterImage img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) img.at(x, y) = {row[x][2], row[x][1], row[x][0]};
    }
    return img;
}

} // namespace detail

/// Decodes PNG/JPEG (anything imgcodecs reads) into 8-bit RGB.
inline RasterImage read_image(const std::filesystem::path& path)
{
    const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw Error("unreadable image: " + path.string());
    return detail::from_bgr(bgr);
}

/// Reads an image and marks dark pixels (luma < 128) as foreground.
inline BinaryMask read_mask(const std::filesystem::path& path)
{
    const RasterImage img = read_image(path);
    BinaryMask mask(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) mask[i] = luma(img[i]) < 128 ? 1 : 0;
    return mask;
}

/// Passes the image through an in-memory JPEG encode/decode.
inline RasterImage jpeg_roundtrip(const RasterImage& img, int quality)
{
    std::vector<unsigned char> buf;
    cv::imencode(".jpg", detail::to_bgr(img), buf, {cv::IMWRITE_JPEG_QUALITY, quality});
    return detail::from_bgr(cv::imdecode(buf, cv::IMREAD_COLOR));
}

/// Encodes by extension: .png lossless, .jpg/.jpeg at `jpeg_quality`.
inline void write_image(const std::filesystem::path& path, const RasterImage& img, int jpeg_quality = 95)
{
    const cv::Mat bgr = detail::to_bgr(img);
    std::vector<int> params;
    const std::string ext = path.extension().string();
    if (ext == ".jpg" || ext == ".jpeg") params = {cv::IMWRITE_JPEG_QUALITY, jpeg_quality};
    if (ext == ".png") params = {cv::IMWRITE_PNG_COMPRESSION, 6};
    if (!cv::imwrite(path.string(), bgr, params)) throw Error("cannot write image: " + path.string());
}

} // namespace fontstat
