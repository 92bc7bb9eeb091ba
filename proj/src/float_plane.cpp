#include "hdrsteg/float_plane.hpp"

#include <bit>
#include <cmath>

namespace hdrsteg {

std::uint32_t float_bits(float x) { return std::bit_cast<std::uint32_t>(x); }

float bits_to_float(std::uint32_t bits) { return std::bit_cast<float>(bits); }

FloatFields decompose(float pixel)
{
    if (!std::isfinite(pixel))
        throw MalformedCoverError("decompose: non-finite pixel");
    const std::uint32_t bits = float_bits(pixel);
    FloatFields f;
    f.sign = static_cast<std::uint8_t>(bits >> 31);
    f.exponent = static_cast<std::uint8_t>((bits >> 23) & 0xffu);
    f.mantissa = bits & 0x7fffffu;
    return f;
}

float recompose(const FloatFields& f)
{
    const std::uint32_t bits = (static_cast<std::uint32_t>(f.sign & 1u) << 31)
        | (static_cast<std::uint32_t>(f.exponent) << 23)
        | (f.mantissa & 0x7fffffu);
    return bits_to_float(bits);
}

int pixel_capacity(float pixel)
{
    if (!std::isfinite(pixel))
        throw MalformedCoverError("capacity: non-finite pixel");
    if (pixel < 0.0f)
        throw MalformedCoverError("capacity: negative pixel");
    if (pixel >= 1.0f)
        return 16;
    const FloatFields f = decompose(pixel);
    if (f.exponent == 0)  // zero or denormal
        return 0;
    return std::max(0, static_cast<int>(f.exponent) - 111);
}

CapacityMap capacity(const ImageF& image)
{
    CapacityMap cap;
    cap.n.resize(image.rows(), image.cols());
    int nx = 16;
    for (Eigen::Index i = 0; i < image.rows(); ++i) {
        for (Eigen::Index j = 0; j < image.cols(); ++j) {
            const int n = pixel_capacity(image(i, j));
            cap.n(i, j) = n;
            nx = std::min(nx, n);
        }
    }
    cap.n_x = image.size() == 0 ? 0 : nx;
    return cap;
}

PlaneStack extract_planes(const ImageF& image, const CapacityMap& cap, int k_planes)
{
    if (k_planes < 1)
        throw CapacityError("extract_planes: k_planes must be >= 1");
    if (k_planes > cap.n_x)
        throw CapacityError("extract_planes: k_planes exceeds n_x");
    PlaneStack stack;
    stack.capacities = cap.n;
    stack.planes.resize(static_cast<std::size_t>(k_planes));
    for (int k = 1; k <= k_planes; ++k) {
        ImageB& plane = stack.planes[static_cast<std::size_t>(k - 1)];
        plane.resize(image.rows(), image.cols());
        for (Eigen::Index i = 0; i < image.rows(); ++i) {
            for (Eigen::Index j = 0; j < image.cols(); ++j) {
                const int b = plane_bit_index(cap.n(i, j), k);
                const std::uint32_t bits = float_bits(image(i, j));
                plane(i, j) = static_cast<std::uint8_t>((bits >> (23 - b)) & 1u);
            }
        }
    }
    return stack;
}

ImageF write_planes(const ImageF& image, const PlaneStack& stack)
{
    if (stack.capacities.rows() != image.rows() || stack.capacities.cols() != image.cols())
        throw MalformedCoverError("write_planes: shape mismatch");
    ImageF out = image;
    const int k_planes = static_cast<int>(stack.planes.size());
    for (int k = 1; k <= k_planes; ++k) {
        const ImageB& plane = stack.planes[static_cast<std::size_t>(k - 1)];
        if (plane.rows() != image.rows() || plane.cols() != image.cols())
            throw MalformedCoverError("write_planes: plane shape mismatch");
        for (Eigen::Index i = 0; i < image.rows(); ++i) {
            for (Eigen::Index j = 0; j < image.cols(); ++j) {
                const int b = plane_bit_index(stack.capacities(i, j), k);
                if (b < 8 || b > 23)
                    throw CapacityError("write_planes: bit index outside mantissa range");
                std::uint32_t bits = float_bits(out(i, j));
                const std::uint32_t mask = 1u << (23 - b);
                bits = (bits & ~mask) | (static_cast<std::uint32_t>(plane(i, j) & 1u) << (23 - b));
                out(i, j) = bits_to_float(bits);
            }
        }
    }
    return out;
}

}  // namespace hdrsteg
