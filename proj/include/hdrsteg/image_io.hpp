#ifndef HDRSTEG_IMAGE_IO_HPP
#define HDRSTEG_IMAGE_IO_HPP

#include <string>
#include <vector>

#include "hdrsteg/types.hpp"

namespace hdrsteg {

struct RgbImage {
    ImageF r, g, b;
};

// Reads a single-channel 32-bit floating-point TIFF.  Integer samples,
// multi-channel files, lossy compression, NaN or negative pixels are all
// rejected with typed errors; sample recovery is bit-exact.
ImageF read_cover(const std::string& path);

// Writes an uncompressed single-channel 32-bit float TIFF that reads back
// bit-identically.
void write_cover(const ImageF& image, const std::string& path);

// Reads a 3-channel 32-bit float TIFF (luminance extraction source).
RgbImage read_rgb(const std::string& path);

// Rec. 709 luminance: Y = 0.2126 R + 0.7152 G + 0.0722 B.
ImageF extract_luminance(const RgbImage& rgb);

// Non-overlapping size x size crops in raster order; remainder borders
// are dropped.
std::vector<ImageF> tile(const ImageF& image, int size);

// Keeps images with n_x >= threshold; with the range filter enabled, also
// requires max / min-positive pixel ratio > 2^8.
std::vector<ImageF> filter_by_capacity(const std::vector<ImageF>& images, int threshold,
                                       bool range_filter = true);

// Plain-text manifest, one path per line.  Blank lines are skipped.
std::vector<std::string> read_manifest(const std::string& path);

}  // namespace hdrsteg

#endif
