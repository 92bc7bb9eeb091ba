#include "hdrsteg/coder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hdrsteg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double canonical_double(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double flip_probability(double lambda, double rho)
{
    if (std::isinf(rho)) return 0.0;
    const double e = std::exp(-lambda * rho);
    return e / (1.0 + e);
}

double plan_entropy(const ImageF& rho, double lambda)
{
    double sum = 0.0;
    const float* data = rho.data();
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        sum += binary_entropy(flip_probability(lambda, data[i]));
    return sum;
}

}  // namespace

double binary_entropy(double p)
{
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

EmbeddingPlan solve_lambda(const CostMap& costs, double message_bits)
{
    const ImageF& rho = costs.rho;
    std::size_t finite = 0;
    for (Eigen::Index i = 0; i < rho.size(); ++i) {
        const float r = rho.data()[i];
        if (std::isnan(r) || r < 0.0f)
            throw Error("solve_lambda: invalid cost entry");
        if (!std::isinf(r)) ++finite;
    }
    if (finite == 0)
        throw CapacityError("solve_lambda: all pixels are wet");
    if (message_bits <= 0.0)
        throw PayloadError("solve_lambda: payload must be positive");
    const double max_bits = static_cast<double>(finite);
    if (message_bits > max_bits)
        throw PayloadError("solve_lambda: payload exceeds entropy capacity");

    EmbeddingPlan plan;
    plan.target_bits = message_bits;

    double lambda = 0.0;
    if (message_bits == max_bits) {
        lambda = 0.0;  // h(1/2) = 1 on every finite-cost pixel
    } else {
        // Grow the bracket until the entropy drops below the target, then
        // bisect in log space.
        double hi = 0x1.0p-20;
        while (plan_entropy(rho, hi) > message_bits) {
            hi *= 2.0;
            if (hi > 0x1.0p60)
                throw Error("solve_lambda: bracket growth failed");
        }
        const double tol = 1e-6 * message_bits;
        if (hi == 0x1.0p-20) {
            // Root sits below the initial bracket; plain bisection on [0, hi].
            double lo = 0.0;
            for (int it = 0; it < 80; ++it) {
                lambda = 0.5 * (lo + hi);
                const double h = plan_entropy(rho, lambda);
                if (std::abs(h - message_bits) <= tol) break;
                (h > message_bits ? lo : hi) = lambda;
            }
        } else {
            double lo = hi / 2.0;
            for (int it = 0; it < 80; ++it) {
                lambda = std::sqrt(lo * hi);
                const double h = plan_entropy(rho, lambda);
                if (std::abs(h - message_bits) <= tol) break;
                (h > message_bits ? lo : hi) = lambda;
            }
        }
    }

    plan.lambda = lambda;
    plan.p.resize(rho.rows(), rho.cols());
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        plan.p.data()[i] = flip_probability(lambda, rho.data()[i]);
    return plan;
}

ImageB simulate(const EmbeddingPlan& plan, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    ImageB mask(plan.p.rows(), plan.p.cols());
    for (Eigen::Index i = 0; i < plan.p.size(); ++i)
        mask.data()[i] = canonical_double(rng) < plan.p.data()[i] ? 1 : 0;
    return mask;
}

StcCode StcCode::make(int h, int max_width, std::uint64_t seed)
{
    if (h < 1 || h > 31)
        throw KeyError("StcCode: constraint height out of range");
    if (max_width < 1)
        throw KeyError("StcCode: width must be positive");
    StcCode code;
    code.h = h;
    code.columns.resize(static_cast<std::size_t>(max_width));
    std::mt19937_64 rng(seed);
    const std::uint32_t top = 1u;
    const std::uint32_t bottom = 1u << (h - 1);
    for (auto& col : code.columns) {
        std::uint32_t middle = 0;
        if (h > 2)
            middle = static_cast<std::uint32_t>(rng()) & ((1u << (h - 1)) - 2u);
        col = top | middle | bottom;
    }
    return code;
}

BitVec stc_encode(const BitVec& cover_bits, const std::vector<float>& costs,
                  const BitVec& message, const StcCode& code)
{
    const std::size_t n = cover_bits.size();
    const std::size_t m = message.size();
    if (costs.size() != n)
        throw Error("stc_encode: cost vector length mismatch");
    if (m == 0)
        return cover_bits;
    if (m > n)
        throw PayloadError("stc_encode: message longer than cover");

    const std::size_t base_w = n / m;
    const std::size_t extra = n % m;
    const std::size_t max_w = base_w + (extra ? 1 : 0);
    if (max_w > code.columns.size())
        throw KeyError("stc_encode: submatrix narrower than required block width");

    const std::uint32_t num_states = 1u << code.h;
    std::vector<double> cur(num_states, kInf), next(num_states);
    cur[0] = 0.0;

    // One chosen-bit per (column, state), bit-packed.
    const std::size_t words_per_col = (num_states + 63) / 64;
    std::vector<std::uint64_t> path(n * words_per_col, 0);

    std::vector<std::uint32_t> col_pattern(n);
    std::size_t i = 0;
    for (std::size_t g = 0; g < m; ++g) {
        const std::size_t w = base_w + (g < extra ? 1 : 0);
        const std::uint32_t mask = (m - g >= static_cast<std::size_t>(code.h))
            ? (num_states - 1)
            : ((1u << (m - g)) - 1u);
        for (std::size_t j = 0; j < w; ++j, ++i) {
            const std::uint32_t pat = code.columns[j] & mask;
            col_pattern[i] = pat;
            const double c = static_cast<double>(costs[i]);
            const bool wet = std::isinf(c);
            const std::uint8_t x = cover_bits[i] & 1u;
            const double cost0 = x == 0 ? 0.0 : c;  // choose y = 0
            const double cost1 = x == 1 ? 0.0 : c;  // choose y = 1
            std::uint64_t* bits = &path[i * words_per_col];
            for (std::uint32_t d = 0; d < num_states; ++d) {
                double best = kInf;
                std::uint32_t y = 0;
                if (!(wet && x == 1))
                    best = cur[d] + cost0;
                if (!(wet && x == 0)) {
                    const double via_one = cur[d ^ pat] + cost1;
                    // Prefer the cover bit on ties so encoding is deterministic.
                    if (via_one < best || (via_one == best && x == 1)) {
                        best = via_one;
                        y = 1;
                    }
                }
                next[d] = best;
                bits[d >> 6] |= static_cast<std::uint64_t>(y) << (d & 63u);
            }
            std::swap(cur, next);
        }
        // Enforce message bit g, then drop it from the state window.
        const std::uint32_t bit = message[g] & 1u;
        bool alive = false;
        for (std::uint32_t s = 0; s < num_states / 2; ++s) {
            next[s] = cur[(s << 1) | bit];
            if (!std::isinf(next[s])) alive = true;
        }
        for (std::uint32_t s = num_states / 2; s < num_states; ++s)
            next[s] = kInf;
        if (!alive)
            throw CapacityError("stc_encode: wet bits block every trellis path");
        std::swap(cur, next);
    }

    // Pick the cheapest terminal state; with the masked tail columns the
    // finite ones collapse to state 0.
    std::uint32_t state = 0;
    double best = cur[0];
    for (std::uint32_t s = 1; s < num_states; ++s) {
        if (cur[s] < best) {
            best = cur[s];
            state = s;
        }
    }
    if (std::isinf(best))
        throw CapacityError("stc_encode: no feasible stego path");

    BitVec stego(n, 0);
    i = n;
    for (std::size_t g = m; g-- > 0;) {
        const std::size_t w = base_w + (g < extra ? 1 : 0);
        state = (state << 1) | (message[g] & 1u);
        for (std::size_t j = w; j-- > 0;) {
            --i;
            const std::uint64_t* bits = &path[i * words_per_col];
            const std::uint32_t y =
                static_cast<std::uint32_t>((bits[state >> 6] >> (state & 63u)) & 1u);
            stego[i] = static_cast<std::uint8_t>(y);
            if (y) state ^= col_pattern[i];
        }
    }
    return stego;
}

BitVec stc_decode(const BitVec& stego_bits, const StcCode& code, std::size_t message_bits)
{
    const std::size_t n = stego_bits.size();
    const std::size_t m = message_bits;
    if (m == 0)
        return {};
    if (m > n)
        throw Error("stc_decode: message length exceeds stego length");
    const std::size_t base_w = n / m;
    const std::size_t extra = n % m;
    const std::size_t max_w = base_w + (extra ? 1 : 0);
    if (max_w > code.columns.size())
        throw KeyError("stc_decode: submatrix narrower than required block width");

    const std::uint32_t full_mask = (1u << code.h) - 1u;
    BitVec message(m, 0);
    std::uint32_t acc = 0;
    std::size_t i = 0;
    for (std::size_t g = 0; g < m; ++g) {
        const std::size_t w = base_w + (g < extra ? 1 : 0);
        const std::uint32_t mask = (m - g >= static_cast<std::size_t>(code.h))
            ? full_mask
            : ((1u << (m - g)) - 1u);
        for (std::size_t j = 0; j < w; ++j, ++i) {
            if (stego_bits[i] & 1u)
                acc ^= code.columns[j] & mask;
        }
        message[g] = static_cast<std::uint8_t>(acc & 1u);
        acc >>= 1;
    }
    return message;
}

}  // namespace hdrsteg
