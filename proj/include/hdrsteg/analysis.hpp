#ifndef HDRSTEG_ANALYSIS_HPP
#define HDRSTEG_ANALYSIS_HPP

#include <string>
#include <vector>

#include "hdrsteg/cost_model.hpp"
#include "hdrsteg/types.hpp"

namespace hdrsteg {

struct EmbedReport {
    std::vector<std::size_t> flips_per_plane;
    double total_distortion = 0.0;
    double change_rate = 0.0;
    ImageB change_map;  // any-plane-changed
};

// Exact per-plane bit diff between cover and stego plus distortion under
// the supplied (corrected) cost map.
EmbedReport diff_report(const ImageF& cover, const ImageF& stego, const CostMap& costs);

// Steganalysis preprocessing: round(clamp(pixel, 0, 1e7)), half away from
// zero, written as a 16-byte header ("HDRSTEGI" + width + height, little
// endian) followed by row-major little-endian int32 samples.
void steganalysis_export(const ImageF& image, const std::string& path);

// Change map as binary PGM (P5, maxval 255, changed = 255).
void change_map_image(const EmbedReport& report, const std::string& path);

}  // namespace hdrsteg

#endif
