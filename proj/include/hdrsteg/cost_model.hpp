#ifndef HDRSTEG_COST_MODEL_HPP
#define HDRSTEG_COST_MODEL_HPP

#include <string>

#include "hdrsteg/types.hpp"

namespace hdrsteg {

enum class CostModel {
    Uniform,             // rho = 1 everywhere
    DirectionalResidual, // inverse-Hoelder aggregation of directional high-pass residuals
    WaveletRelative,     // summed inverse wavelet coefficient magnitudes
};

CostModel cost_model_from_name(const std::string& name);
std::string cost_model_name(CostModel model);

// Per-pixel flip cost.  Entries are nonnegative; +inf marks a wet pixel
// that must never be flipped.
struct CostMap {
    ImageF rho;
    bool corrected = false;
};

CostMap cost(const ImageF& image, CostModel model);

// Exponent distortion-bias correction: rho* = rho / 2^|E - 127|.
CostMap correct(const CostMap& costs, const ImageF& image);

// Debug export: one text header line "width height model", then row-major
// little-endian 32-bit float samples.
void export_cost_map(const CostMap& costs, CostModel model, const std::string& path);

}  // namespace hdrsteg

#endif
