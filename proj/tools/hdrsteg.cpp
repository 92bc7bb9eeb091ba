#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "hdrsteg/analysis.hpp"
#include "hdrsteg/image_io.hpp"
#include "hdrsteg/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hdrsteg;

namespace {

BitVec read_message_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read message file: " + path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    BitVec bits;
    bits.reserve(bytes.size() * 8);
    for (char c : bytes) {
        const auto byte = static_cast<std::uint8_t>(c);
        for (int b = 7; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((byte >> b) & 1u));
    }
    return bits;
}

void write_message_file(const BitVec& bits, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write message file: " + path);
    for (std::size_t i = 0; i < bits.size(); i += 8) {
        std::uint8_t byte = 0;
        for (std::size_t b = 0; b < 8 && i + b < bits.size(); ++b)
            byte = static_cast<std::uint8_t>(byte | ((bits[i + b] & 1u) << (7 - b)));
        out.put(static_cast<char>(byte));
    }
}

int run(int argc, char** argv)
{
    CLI::App app{"HDR float-TIFF steganography toolkit"};
    app.require_subcommand(1);

    // keygen
    auto* keygen = app.add_subcommand("keygen", "Write a new stego key file");
    std::string kg_out;
    StegoKey kg_key;
    std::string kg_model = "directional";
    keygen->add_option("--out", kg_out, "Key file path")->required();
    keygen->add_option("--payload", kg_key.relative_payload, "Relative payload per plane (bits/pixel)");
    keygen->add_option("--planes", kg_key.planes, "Number of cover planes K");
    keygen->add_option("--cost-model", kg_model, "uniform | directional | wavelet");
    keygen->add_option("--stc-h", kg_key.stc_h, "STC constraint height");
    keygen->add_option("--seed", kg_key.perm_seed, "Permutation seed");
    bool kg_noframe = false;
    keygen->add_flag("--no-framing", kg_noframe, "Disable the 32-bit length header");

    // embed
    auto* emb = app.add_subcommand("embed", "Embed a message file into a cover TIFF");
    std::string em_cover, em_key, em_msg, em_out;
    emb->add_option("--cover", em_cover)->required();
    emb->add_option("--key", em_key)->required();
    emb->add_option("--message", em_msg)->required();
    emb->add_option("--out", em_out)->required();

    // extract
    auto* ext = app.add_subcommand("extract", "Recover the message from a stego TIFF");
    std::string ex_stego, ex_key, ex_out;
    ext->add_option("--stego", ex_stego)->required();
    ext->add_option("--key", ex_key)->required();
    ext->add_option("--out", ex_out)->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Optimal-embedding simulator run");
    std::string sm_cover, sm_key, sm_out, sm_mask;
    std::size_t sm_bits = 0;
    std::uint64_t sm_seed = 0;
    sim->add_option("--cover", sm_cover)->required();
    sim->add_option("--key", sm_key)->required();
    sim->add_option("--bits", sm_bits, "Total message bits to simulate")->required();
    sim->add_option("--seed", sm_seed, "Simulator seed");
    sim->add_option("--out", sm_out)->required();
    sim->add_option("--mask", sm_mask, "Optional flip-mask PGM path");

    // inspect
    auto* ins = app.add_subcommand("inspect", "Print capacity and range statistics");
    std::string in_image;
    ins->add_option("--image", in_image)->required();

    // prep
    auto* prep = app.add_subcommand("prep", "Luminance extraction, tiling and capacity filter");
    std::string pr_rgb, pr_gray, pr_outdir, pr_manifest;
    int pr_tile = 512, pr_minnx = 10;
    bool pr_norange = false;
    prep->add_option("--rgb", pr_rgb, "3-channel float TIFF input");
    prep->add_option("--gray", pr_gray, "Grayscale float TIFF input");
    prep->add_option("--tile", pr_tile, "Tile size in pixels");
    prep->add_option("--min-nx", pr_minnx, "Minimum n_x to keep a tile");
    prep->add_flag("--no-range-filter", pr_norange, "Skip the dynamic-range filter");
    prep->add_option("--outdir", pr_outdir)->required();
    prep->add_option("--manifest", pr_manifest, "Manifest path for kept tiles");

    // report
    auto* rep = app.add_subcommand("report", "Cover/stego diff report and exports");
    std::string rp_cover, rp_stego, rp_key, rp_map, rp_export_cover, rp_export_stego, rp_costmap;
    rep->add_option("--cover", rp_cover)->required();
    rep->add_option("--stego", rp_stego)->required();
    rep->add_option("--key", rp_key)->required();
    rep->add_option("--change-map", rp_map, "Change map PGM path");
    rep->add_option("--export-cover", rp_export_cover, "Steganalysis export of the cover");
    rep->add_option("--export-stego", rp_export_stego, "Steganalysis export of the stego");
    rep->add_option("--cost-map", rp_costmap, "Corrected cost map export path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage error
    }

    if (keygen->parsed()) {
        kg_key.model = cost_model_from_name(kg_model);
        kg_key.framing = !kg_noframe;
        if (!(kg_key.relative_payload > 0.0 && kg_key.relative_payload < 1.0))
            throw KeyError("keygen: relative payload must lie in (0,1)");
        kg_key.save(kg_out);
    } else if (emb->parsed()) {
        const StegoKey key = StegoKey::load(em_key);
        const ImageF cover = read_cover(em_cover);
        const BitVec message = read_message_file(em_msg);
        const ImageF stego = embed(cover, message, key);
        write_cover(stego, em_out);
    } else if (ext->parsed()) {
        const StegoKey key = StegoKey::load(ex_key);
        const ImageF stego = read_cover(ex_stego);
        write_message_file(extract(stego, key), ex_out);
    } else if (sim->parsed()) {
        const StegoKey key = StegoKey::load(sm_key);
        const ImageF cover = read_cover(sm_cover);
        auto [stego, mask] = simulate_embed(cover, sm_bits, key, sm_seed);
        write_cover(stego, sm_out);
        if (!sm_mask.empty()) {
            EmbedReport r;
            r.change_map = mask;
            change_map_image(r, sm_mask);
        }
    } else if (ins->parsed()) {
        const ImageF image = read_cover(in_image);
        const CapacityMap cap = capacity(image);
        float min_pos = std::numeric_limits<float>::infinity();
        for (Eigen::Index i = 0; i < image.size(); ++i)
            if (image.data()[i] > 0.0f) min_pos = std::min(min_pos, image.data()[i]);
        const float max_val = image.maxCoeff();
        std::cout << "size " << image.cols() << "x" << image.rows() << "\n"
                  << "min " << image.minCoeff() << "\n"
                  << "max " << max_val << "\n"
                  << "dynamic_range " << (min_pos > 0.0f ? max_val / min_pos : 0.0f) << "\n"
                  << "n_x = " << cap.n_x << "\n";
    } else if (prep->parsed()) {
        if (pr_rgb.empty() == pr_gray.empty())
            throw KeyError("prep: give exactly one of --rgb / --gray");
        const ImageF lum = pr_rgb.empty() ? read_cover(pr_gray)
                                          : extract_luminance(read_rgb(pr_rgb));
        const std::vector<ImageF> tiles = tile(lum, pr_tile);
        const std::vector<ImageF> kept = filter_by_capacity(tiles, pr_minnx, !pr_norange);
        fs::create_directories(pr_outdir);
        std::vector<std::string> paths;
        for (std::size_t t = 0; t < kept.size(); ++t) {
            const std::string path =
                (fs::path(pr_outdir) / ("tile_" + std::to_string(t) + ".tif")).string();
            write_cover(kept[t], path);
            paths.push_back(path);
        }
        if (!pr_manifest.empty()) {
            std::ofstream mf(pr_manifest);
            for (const auto& p : paths) mf << p << '\n';
        }
        std::cout << "tiles " << tiles.size() << " kept " << kept.size() << "\n";
    } else if (rep->parsed()) {
        const StegoKey key = StegoKey::load(rp_key);
        const ImageF cover = read_cover(rp_cover);
        const ImageF stego = read_cover(rp_stego);
        const CostMap costs = embedding_costs(cover, key);
        const EmbedReport report = diff_report(cover, stego, costs);
        std::cout << "planes " << report.flips_per_plane.size() << "\n";
        for (std::size_t k = 0; k < report.flips_per_plane.size(); ++k)
            std::cout << "flips_plane_" << (k + 1) << " " << report.flips_per_plane[k] << "\n";
        std::cout << "total_distortion " << report.total_distortion << "\n"
                  << "change_rate " << report.change_rate << "\n";
        if (!rp_map.empty()) change_map_image(report, rp_map);
        if (!rp_export_cover.empty()) steganalysis_export(cover, rp_export_cover);
        if (!rp_export_stego.empty()) steganalysis_export(stego, rp_export_stego);
        if (!rp_costmap.empty()) export_cost_map(costs, key.model, rp_costmap);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const CapacityError& e) {
        std::cerr << "hdrsteg: capacity-error: " << e.what() << "\n";
        return 3;
    } catch (const PayloadError& e) {
        std::cerr << "hdrsteg: payload-error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "hdrsteg: data-error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hdrsteg: error: " << e.what() << "\n";
        return 2;
    }
}
