#ifndef HDRSTEG_CODER_HPP
#define HDRSTEG_CODER_HPP

#include <cstdint>
#include <vector>

#include "hdrsteg/cost_model.hpp"
#include "hdrsteg/types.hpp"

namespace hdrsteg {

// Optimal-embedding plan: per-pixel flip probabilities whose binary
// entropies sum to the target payload.
struct EmbeddingPlan {
    ImageD p;
    double lambda = 0.0;
    double target_bits = 0.0;
};

double binary_entropy(double p);

// Solves the payload constraint sum h(p) = m for lambda by bisection,
// with p = e^(-lambda rho) / (1 + e^(-lambda rho)).  Wet pixels get p = 0.
EmbeddingPlan solve_lambda(const CostMap& costs, double message_bits);

// Independent per-pixel Bernoulli flips; reproducible under a fixed seed.
ImageB simulate(const EmbeddingPlan& plan, std::uint64_t seed);

// Syndrome-trellis code: an h x w submatrix placed in banded form.  The
// column patterns are pseudo-random but deterministic for a given seed,
// with the first and last submatrix rows forced to ones.
struct StcCode {
    int h = 0;
    std::vector<std::uint32_t> columns;  // one h-bit pattern per in-block position

    static StcCode make(int h, int max_width, std::uint64_t seed);
};

// Minimum-distortion coset member with H * stego = message (mod 2),
// exact Viterbi over 2^h states.  Wet positions (infinite cost) are
// pruned from the trellis; if every path dies, throws CapacityError.
BitVec stc_encode(const BitVec& cover_bits, const std::vector<float>& costs,
                  const BitVec& message, const StcCode& code);

// Receiver side: message = H * stego (mod 2).
BitVec stc_decode(const BitVec& stego_bits, const StcCode& code, std::size_t message_bits);

}  // namespace hdrsteg

#endif
