#include "hdrsteg/cost_model.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "hdrsteg/float_plane.hpp"

namespace hdrsteg {

namespace {

constexpr double kResidualEps = 1e-10;
constexpr double kWaveletSigma = 1.0;

// Symmetric (half-sample mirror) boundary extension.
inline Eigen::Index reflect(Eigen::Index i, Eigen::Index n)
{
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

// Correlation with an arbitrary small kernel; anchor picks which kernel
// cell sits on the output pixel.
ImageD correlate(const ImageD& img, const ImageD& kernel, Eigen::Index anchor_r,
                 Eigen::Index anchor_c)
{
    ImageD out(img.rows(), img.cols());
    for (Eigen::Index i = 0; i < img.rows(); ++i) {
        for (Eigen::Index j = 0; j < img.cols(); ++j) {
            double acc = 0.0;
            for (Eigen::Index u = 0; u < kernel.rows(); ++u) {
                const Eigen::Index ri = reflect(i + u - anchor_r, img.rows());
                for (Eigen::Index v = 0; v < kernel.cols(); ++v) {
                    const Eigen::Index rj = reflect(j + v - anchor_c, img.cols());
                    acc += img(ri, rj) * kernel(u, v);
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

ImageF directional_residual_cost(const ImageD& img)
{
    std::vector<ImageD> kernels;
    ImageD h(1, 3), v(3, 1), d(3, 3);
    h << -1.0, 2.0, -1.0;
    v << -1.0, 2.0, -1.0;
    d.setZero();
    d(0, 0) = -1.0;
    d(1, 1) = 2.0;
    d(2, 2) = -1.0;
    kernels.push_back(h);
    kernels.push_back(v);
    kernels.push_back(d);

    ImageD rho = ImageD::Zero(img.rows(), img.cols());
    for (const ImageD& k : kernels) {
        const ImageD residual =
            correlate(img, k, k.rows() / 2, k.cols() / 2);
        const ImageD k_abs = k.abs();
        const ImageD xi =
            correlate(residual.abs(), k_abs, k.rows() / 2, k.cols() / 2) + kResidualEps;
        rho += xi.inverse();
    }
    return rho.cast<float>();
}

ImageF wavelet_relative_cost(const ImageD& img)
{
    const double lo[2] = {0.5, 0.5};
    const double hi[2] = {0.5, -0.5};
    // Three one-level orientations: row filter x column filter.
    const double* row_f[3] = {lo, hi, hi};
    const double* col_f[3] = {hi, lo, hi};

    ImageD ones(2, 2);
    ones.setOnes();

    ImageD rho = ImageD::Zero(img.rows(), img.cols());
    for (int d = 0; d < 3; ++d) {
        ImageD k(2, 2);
        for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v)
                k(u, v) = row_f[d][u] * col_f[d][v];
        const ImageD coeff = correlate(img, k, 0, 0);
        const ImageD inv = (coeff.abs() + kWaveletSigma).inverse();
        // Each pixel collects the inverse magnitudes of every coefficient
        // whose 2x2 support covers it.
        rho += correlate(inv, ones, 1, 1);
    }
    return rho.cast<float>();
}

}  // namespace

CostModel cost_model_from_name(const std::string& name)
{
    if (name == "uniform") return CostModel::Uniform;
    if (name == "directional") return CostModel::DirectionalResidual;
    if (name == "wavelet") return CostModel::WaveletRelative;
    throw KeyError("unknown cost model: " + name);
}

std::string cost_model_name(CostModel model)
{
    switch (model) {
    case CostModel::Uniform: return "uniform";
    case CostModel::DirectionalResidual: return "directional";
    case CostModel::WaveletRelative: return "wavelet";
    }
    throw KeyError("unknown cost model selector");
}

CostMap cost(const ImageF& image, CostModel model)
{
    CostMap map;
    switch (model) {
    case CostModel::Uniform:
        map.rho = ImageF::Ones(image.rows(), image.cols());
        break;
    case CostModel::DirectionalResidual:
        map.rho = directional_residual_cost(image.cast<double>());
        break;
    case CostModel::WaveletRelative:
        map.rho = wavelet_relative_cost(image.cast<double>());
        break;
    }
    return map;
}

CostMap correct(const CostMap& costs, const ImageF& image)
{
    if (costs.corrected)
        throw Error("correct: cost map already corrected");
    if (costs.rho.rows() != image.rows() || costs.rho.cols() != image.cols())
        throw Error("correct: shape mismatch");
    CostMap out;
    out.corrected = true;
    out.rho.resize(image.rows(), image.cols());
    for (Eigen::Index i = 0; i < image.rows(); ++i) {
        for (Eigen::Index j = 0; j < image.cols(); ++j) {
            const FloatFields f = decompose(image(i, j));
            const double beta = std::exp2(std::abs(static_cast<int>(f.exponent) - 127));
            out.rho(i, j) = static_cast<float>(costs.rho(i, j) / beta);
        }
    }
    return out;
}

void export_cost_map(const CostMap& costs, CostModel model, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open cost map file for writing: " + path);
    out << costs.rho.cols() << ' ' << costs.rho.rows() << ' ' << cost_model_name(model) << '\n';
    static_assert(std::endian::native == std::endian::little);
    for (Eigen::Index i = 0; i < costs.rho.rows(); ++i)
        out.write(reinterpret_cast<const char*>(costs.rho.row(i).data()),
                  static_cast<std::streamsize>(costs.rho.cols() * sizeof(float)));
    if (!out)
        throw IoError("cost map write failed: " + path);
}

}  // namespace hdrsteg
