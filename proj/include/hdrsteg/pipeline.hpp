#ifndef HDRSTEG_PIPELINE_HPP
#define HDRSTEG_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hdrsteg/coder.hpp"
#include "hdrsteg/cost_model.hpp"
#include "hdrsteg/float_plane.hpp"
#include "hdrsteg/types.hpp"

namespace hdrsteg {

// Everything sender and receiver share.  Serialization is canonical
// (fixed field order and formatting) so key files hash stably.
struct StegoKey {
    int version = 1;
    double relative_payload = 0.05;  // message bits per pixel per plane
    int planes = 1;
    CostModel model = CostModel::DirectionalResidual;
    int stc_h = 10;
    std::uint64_t perm_seed = 0;
    bool framing = true;

    std::string serialize() const;
    static StegoKey parse(const std::string& text);

    void save(const std::string& path) const;
    static StegoKey load(const std::string& path);
};

// Ceil/floor dispersion of m bits over k planes; totals m.
std::vector<std::size_t> split_quota(std::size_t m, int k);

// Seven-step sender procedure: capacity, per-plane quota, corrected cost,
// per-plane STC under a keyed pixel permutation, writeback.
ImageF embed(const ImageF& cover, const BitVec& message, const StegoKey& key);

// Receiver side; recomputes capacity from the stego itself (exponents are
// untouched by embedding).
BitVec extract(const ImageF& stego, const StegoKey& key);

// Optimal-embedding simulator path: flips drawn from the embedding plan
// instead of running STC.  Returns the stego and the any-plane flip mask.
std::pair<ImageF, ImageB> simulate_embed(const ImageF& cover, std::size_t message_bits,
                                         const StegoKey& key, std::uint64_t seed);

// Corrected cost map exactly as embed computes it (step 4).
CostMap embedding_costs(const ImageF& cover, const StegoKey& key);

// Per-plane STC quota implied by the key for an n1 x n2 cover.
std::size_t plane_quota(const StegoKey& key, Eigen::Index pixels);

}  // namespace hdrsteg

#endif
