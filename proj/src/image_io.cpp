#include "hdrsteg/image_io.hpp"

#include "hdrsteg/float_plane.hpp"

#include <tiffio.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

namespace hdrsteg {

namespace {

struct TiffCloser {
    void operator()(TIFF* t) const
    {
        if (t) TIFFClose(t);
    }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

TiffPtr open_tiff(const std::string& path, const char* mode)
{
    // Route libtiff warnings away from stderr; errors surface as nulls.
    TIFFSetWarningHandler(nullptr);
    TiffPtr tif(TIFFOpen(path.c_str(), mode));
    if (!tif)
        throw IoError("cannot open TIFF: " + path);
    return tif;
}

bool lossless_compression(std::uint16_t c)
{
    switch (c) {
    case COMPRESSION_NONE:
    case COMPRESSION_LZW:
    case COMPRESSION_DEFLATE:
    case COMPRESSION_ADOBE_DEFLATE:
    case COMPRESSION_PACKBITS:
        return true;
    default:
        return false;
    }
}

void check_float_format(TIFF* tif, const std::string& path, std::uint16_t want_spp)
{
    std::uint16_t bps = 0, spp = 1, fmt = SAMPLEFORMAT_UINT, comp = COMPRESSION_NONE;
    TIFFGetField(tif, TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLEFORMAT, &fmt);
    TIFFGetFieldDefaulted(tif, TIFFTAG_COMPRESSION, &comp);
    if (spp != want_spp)
        throw MalformedCoverError("TIFF has " + std::to_string(spp) + " channels, expected "
                                  + std::to_string(want_spp) + ": " + path);
    if (bps != 32 || fmt != SAMPLEFORMAT_IEEEFP)
        throw MalformedCoverError("TIFF samples are not 32-bit IEEE float: " + path);
    if (!lossless_compression(comp))
        throw MalformedCoverError("TIFF uses lossy compression: " + path);
}

std::pair<std::uint32_t, std::uint32_t> tiff_dims(TIFF* tif, const std::string& path)
{
    std::uint32_t w = 0, h = 0;
    TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &h);
    if (w == 0 || h == 0)
        throw MalformedCoverError("TIFF has empty dimensions: " + path);
    return {w, h};
}

}  // namespace

ImageF read_cover(const std::string& path)
{
    TiffPtr tif = open_tiff(path, "r");
    check_float_format(tif.get(), path, 1);
    auto [w, h] = tiff_dims(tif.get(), path);

    ImageF image(h, w);
    std::vector<float> row(w);
    for (std::uint32_t i = 0; i < h; ++i) {
        if (TIFFReadScanline(tif.get(), row.data(), i) < 0)
            throw IoError("TIFF scanline read failed: " + path);
        for (std::uint32_t j = 0; j < w; ++j) {
            const float v = row[j];
            if (!std::isfinite(v))
                throw MalformedCoverError("cover contains non-finite pixel: " + path);
            if (v < 0.0f)
                throw MalformedCoverError("cover contains negative pixel: " + path);
            image(i, j) = v;
        }
    }
    return image;
}

void write_cover(const ImageF& image, const std::string& path)
{
    if (image.size() == 0)
        throw MalformedCoverError("write_cover: empty image");
    TiffPtr tif = open_tiff(path, "w");
    TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(image.cols()));
    TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(image.rows()));
    TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, 32);
    TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, 1);
    TIFFSetField(tif.get(), TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_IEEEFP);
    TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
    TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, 1);

    std::vector<float> row(static_cast<std::size_t>(image.cols()));
    for (Eigen::Index i = 0; i < image.rows(); ++i) {
        for (Eigen::Index j = 0; j < image.cols(); ++j)
            row[static_cast<std::size_t>(j)] = image(i, j);
        if (TIFFWriteScanline(tif.get(), row.data(), static_cast<std::uint32_t>(i)) < 0)
            throw IoError("TIFF scanline write failed: " + path);
    }
}

RgbImage read_rgb(const std::string& path)
{
    TiffPtr tif = open_tiff(path, "r");
    check_float_format(tif.get(), path, 3);
    auto [w, h] = tiff_dims(tif.get(), path);

    RgbImage rgb;
    rgb.r.resize(h, w);
    rgb.g.resize(h, w);
    rgb.b.resize(h, w);
    std::vector<float> row(static_cast<std::size_t>(w) * 3);
    for (std::uint32_t i = 0; i < h; ++i) {
        if (TIFFReadScanline(tif.get(), row.data(), i) < 0)
            throw IoError("TIFF scanline read failed: " + path);
        for (std::uint32_t j = 0; j < w; ++j) {
            const float r = row[3 * j], g = row[3 * j + 1], b = row[3 * j + 2];
            if (!std::isfinite(r) || !std::isfinite(g) || !std::isfinite(b))
                throw MalformedCoverError("RGB image contains non-finite sample: " + path);
            if (r < 0.0f || g < 0.0f || b < 0.0f)
                throw MalformedCoverError("RGB image contains negative sample: " + path);
            rgb.r(i, j) = r;
            rgb.g(i, j) = g;
            rgb.b(i, j) = b;
        }
    }
    return rgb;
}

ImageF extract_luminance(const RgbImage& rgb)
{
    if (rgb.r.rows() != rgb.g.rows() || rgb.r.rows() != rgb.b.rows()
        || rgb.r.cols() != rgb.g.cols() || rgb.r.cols() != rgb.b.cols())
        throw MalformedCoverError("extract_luminance: channel shape mismatch");
    return 0.2126f * rgb.r + 0.7152f * rgb.g + 0.0722f * rgb.b;
}

std::vector<ImageF> tile(const ImageF& image, int size)
{
    if (size <= 0)
        throw MalformedCoverError("tile: size must be positive");
    std::vector<ImageF> tiles;
    const Eigen::Index s = size;
    for (Eigen::Index i = 0; i + s <= image.rows(); i += s)
        for (Eigen::Index j = 0; j + s <= image.cols(); j += s)
            tiles.emplace_back(image.block(i, j, s, s));
    return tiles;
}

std::vector<ImageF> filter_by_capacity(const std::vector<ImageF>& images, int threshold,
                                       bool range_filter)
{
    std::vector<ImageF> kept;
    for (const ImageF& img : images) {
        int nx = 16;
        float min_pos = std::numeric_limits<float>::infinity();
        float max_val = 0.0f;
        for (Eigen::Index i = 0; i < img.rows(); ++i) {
            for (Eigen::Index j = 0; j < img.cols(); ++j) {
                const float v = img(i, j);
                nx = std::min(nx, pixel_capacity(v));
                if (v > 0.0f) min_pos = std::min(min_pos, v);
                max_val = std::max(max_val, v);
            }
        }
        if (img.size() == 0 || nx < threshold)
            continue;
        if (range_filter && !(max_val / min_pos > 256.0f))
            continue;
        kept.push_back(img);
    }
    return kept;
}

std::vector<std::string> read_manifest(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open manifest: " + path);
    std::vector<std::string> paths;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) paths.push_back(line);
    }
    return paths;
}

}  // namespace hdrsteg
