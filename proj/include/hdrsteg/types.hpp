#ifndef HDRSTEG_TYPES_HPP
#define HDRSTEG_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hdrsteg {

// All image grids are row-major so that pixel (i, j) of an n1 x n2 image
// maps to flat index i * n2 + j, the order every keyed permutation and
// plane extraction assumes.
using ImageF = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ImageD = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ImageI = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ImageB = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using BitVec = std::vector<std::uint8_t>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cover fails a structural precondition (NaN, negative pixel, wrong format).
struct MalformedCoverError : Error {
    using Error::Error;
};

// Requested planes or message bits exceed what the cover can carry.
struct CapacityError : Error {
    using Error::Error;
};

struct PayloadError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct KeyError : Error {
    using Error::Error;
};

}  // namespace hdrsteg

#endif
