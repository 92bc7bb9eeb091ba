#ifndef HDRSTEG_FLOAT_PLANE_HPP
#define HDRSTEG_FLOAT_PLANE_HPP

#include <cstdint>
#include <vector>

#include "hdrsteg/types.hpp"

namespace hdrsteg {

// Raw IEEE-754 single-precision fields of one pixel.  Mantissa bits are
// indexed b = 1 (most significant) .. 23 (least significant), so bit b is
// (mantissa >> (23 - b)) & 1.
struct FloatFields {
    std::uint8_t sign = 0;       // 1 bit
    std::uint8_t exponent = 0;   // biased, 0..255
    std::uint32_t mantissa = 0;  // 23-bit field

    bool operator==(const FloatFields&) const = default;
};

FloatFields decompose(float pixel);
float recompose(const FloatFields& fields);

std::uint32_t float_bits(float x);
float bits_to_float(std::uint32_t bits);

// Per-pixel embeddable bit counts and their image-wide minimum.
struct CapacityMap {
    ImageI n;
    int n_x = 0;
};

// Maximum embeddable mantissa bits of one pixel:
//   16                  for pixel >= 1
//   max(0, E - 111)     for 0 < pixel < 1 (normal)
//   0                   for zeros and denormals
int pixel_capacity(float pixel);

CapacityMap capacity(const ImageF& image);

// Mantissa bit index carrying cover plane k of a pixel with capacity n.
// Plane 1 is the effective LSB; deeper planes move one bit up.
inline int plane_bit_index(int n, int k) { return 7 + n - (k - 1); }

// K binary cover planes extracted in row-major pixel order.  planes[k-1]
// holds plane k; the per-pixel bit position follows plane_bit_index with
// the capacities recorded alongside.
struct PlaneStack {
    std::vector<ImageB> planes;
    ImageI capacities;
};

PlaneStack extract_planes(const ImageF& image, const CapacityMap& cap, int k_planes);

// Writes possibly modified planes back into the pixels.  Sign and exponent
// fields are untouched, so capacity(stego) == capacity(cover).
ImageF write_planes(const ImageF& image, const PlaneStack& stack);

}  // namespace hdrsteg

#endif
