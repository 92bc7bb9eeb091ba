#include "hdrsteg/analysis.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include "hdrsteg/float_plane.hpp"

namespace hdrsteg {

EmbedReport diff_report(const ImageF& cover, const ImageF& stego, const CostMap& costs)
{
    if (cover.rows() != stego.rows() || cover.cols() != stego.cols()
        || costs.rho.rows() != cover.rows() || costs.rho.cols() != cover.cols())
        throw Error("diff_report: shape mismatch");

    EmbedReport report;
    report.change_map = ImageB::Zero(cover.rows(), cover.cols());
    std::size_t total_flips = 0;
    for (Eigen::Index i = 0; i < cover.rows(); ++i) {
        for (Eigen::Index j = 0; j < cover.cols(); ++j) {
            const std::uint32_t diff = float_bits(cover(i, j)) ^ float_bits(stego(i, j));
            if (diff == 0)
                continue;
            if (diff >> 23)
                throw Error("diff_report: images differ outside the mantissa field");
            const int n = pixel_capacity(cover(i, j));
            report.change_map(i, j) = 1;
            for (int b = 8; b <= 23; ++b) {
                if ((diff >> (23 - b)) & 1u) {
                    const int k = 8 + n - b;  // inverse of plane_bit_index
                    if (k < 1)
                        throw Error("diff_report: flipped bit below the effective LSB range");
                    if (static_cast<std::size_t>(k) > report.flips_per_plane.size())
                        report.flips_per_plane.resize(static_cast<std::size_t>(k), 0);
                    ++report.flips_per_plane[static_cast<std::size_t>(k - 1)];
                    report.total_distortion += static_cast<double>(costs.rho(i, j));
                    ++total_flips;
                }
            }
        }
    }
    const std::size_t planes = report.flips_per_plane.size();
    if (planes > 0)
        report.change_rate = static_cast<double>(total_flips)
            / (static_cast<double>(cover.size()) * static_cast<double>(planes));
    return report;
}

void steganalysis_export(const ImageF& image, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open export file: " + path);
    static_assert(std::endian::native == std::endian::little);
    char magic[8] = {'H', 'D', 'R', 'S', 'T', 'E', 'G', 'I'};
    const std::uint32_t w = static_cast<std::uint32_t>(image.cols());
    const std::uint32_t h = static_cast<std::uint32_t>(image.rows());
    out.write(magic, 8);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    for (Eigen::Index i = 0; i < image.size(); ++i) {
        const double clamped = std::min(std::max(static_cast<double>(image.data()[i]), 0.0), 1e7);
        const std::int32_t v = static_cast<std::int32_t>(std::llround(clamped));
        out.write(reinterpret_cast<const char*>(&v), 4);
    }
    if (!out)
        throw IoError("export write failed: " + path);
}

void change_map_image(const EmbedReport& report, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open change map file: " + path);
    const ImageB& map = report.change_map;
    out << "P5\n" << map.cols() << ' ' << map.rows() << "\n255\n";
    for (Eigen::Index i = 0; i < map.size(); ++i) {
        const char px = map.data()[i] ? static_cast<char>(0xff) : 0;
        out.put(px);
    }
    if (!out)
        throw IoError("change map write failed: " + path);
}

}  // namespace hdrsteg
