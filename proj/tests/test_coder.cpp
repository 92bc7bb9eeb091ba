#include <doctest.h>

#include <cmath>
#include <random>

#include "hdrsteg/coder.hpp"

using namespace hdrsteg;

namespace {

constexpr float kInfF = std::numeric_limits<float>::infinity();

// Dense parity-check matrix rows reconstructed from the banded placement,
// independent of the trellis implementation.
std::vector<std::uint64_t> dense_parity_rows(const StcCode& code, std::size_t n, std::size_t m)
{
    std::vector<std::uint64_t> rows(m, 0);
    const std::size_t base_w = n / m;
    const std::size_t extra = n % m;
    std::size_t i = 0;
    for (std::size_t g = 0; g < m; ++g) {
        const std::size_t w = base_w + (g < extra ? 1 : 0);
        for (std::size_t j = 0; j < w; ++j, ++i) {
            const std::uint32_t col = code.columns[j];
            for (std::size_t r = 0; r < static_cast<std::size_t>(code.h) && g + r < m; ++r)
                if ((col >> r) & 1u)
                    rows[g + r] |= 1ull << i;
        }
    }
    return rows;
}

BitVec syndrome_of(const std::vector<std::uint64_t>& rows, std::uint64_t word)
{
    BitVec s(rows.size());
    for (std::size_t g = 0; g < rows.size(); ++g)
        s[g] = static_cast<std::uint8_t>(std::popcount(rows[g] & word) & 1);
    return s;
}

std::uint64_t to_word(const BitVec& bits)
{
    std::uint64_t w = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        w |= static_cast<std::uint64_t>(bits[i] & 1u) << i;
    return w;
}

// Exhaustive minimum distortion over the whole coset (tiny n only).
double coset_minimum(const std::vector<std::uint64_t>& rows, std::uint64_t cover,
                     const std::vector<float>& costs, const BitVec& message, std::size_t n)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t z = 0; z < (1ull << n); ++z) {
        bool match = true;
        for (std::size_t g = 0; g < rows.size() && match; ++g)
            match = (std::popcount(rows[g] & z) & 1) == (message[g] & 1);
        if (!match)
            continue;
        double d = 0.0;
        std::uint64_t diff = z ^ cover;
        while (diff) {
            const int i = std::countr_zero(diff);
            d += static_cast<double>(costs[static_cast<std::size_t>(i)]);
            diff &= diff - 1;
        }
        best = std::min(best, d);
    }
    return best;
}

CostMap uniform_costs(Eigen::Index rows, Eigen::Index cols)
{
    CostMap map;
    map.rho = ImageF::Ones(rows, cols);
    return map;
}

}  // namespace

TEST_CASE("lambda = 0 recovered exactly at full payload")
{
    const CostMap map = uniform_costs(4, 4);
    const EmbeddingPlan plan = solve_lambda(map, 16.0);
    CHECK(plan.lambda == 0.0);
    for (Eigen::Index i = 0; i < plan.p.size(); ++i)
        CHECK(plan.p.data()[i] == 0.5);
}

TEST_CASE("uniform cost at half payload inverts the binary entropy")
{
    // Oracle: bisection on h(p) = 1/2 directly.
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (binary_entropy(mid) < 0.5 ? lo : hi) = mid;
    }
    const double p_expected = 0.5 * (lo + hi);
    CHECK(p_expected == doctest::Approx(0.110).epsilon(1e-2));

    const CostMap map = uniform_costs(10, 10);
    const EmbeddingPlan plan = solve_lambda(map, 50.0);
    for (Eigen::Index i = 0; i < plan.p.size(); ++i)
        CHECK(plan.p.data()[i] == doctest::Approx(p_expected).epsilon(1e-5));
}

TEST_CASE("entropy constraint holds across random cost maps")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        CostMap map;
        map.rho.resize(16, 16);
        for (Eigen::Index i = 0; i < map.rho.size(); ++i)
            map.rho.data()[i] = 0.05f + static_cast<float>(rng() % 1000) / 250.0f;
        const double m = 1.0 + static_cast<double>(rng() % 200);
        const EmbeddingPlan plan = solve_lambda(map, m);
        double h = 0.0;
        for (Eigen::Index i = 0; i < plan.p.size(); ++i)
            h += binary_entropy(plan.p.data()[i]);
        CHECK(std::abs(h - m) <= 1e-6 * m);
        // Eq. 3 closed form, pointwise
        for (Eigen::Index i = 0; i < plan.p.size(); ++i) {
            const double e = std::exp(-plan.lambda * map.rho.data()[i]);
            CHECK(plan.p.data()[i] == doctest::Approx(e / (1.0 + e)).epsilon(1e-12));
        }
    }
}

TEST_CASE("cheaper pixels get larger flip probability")
{
    CostMap map;
    map.rho.resize(1, 2);
    map.rho << 0.5f, 2.0f;
    const EmbeddingPlan plan = solve_lambda(map, 1.0);
    CHECK(plan.p(0, 0) > plan.p(0, 1));
    CHECK(plan.p(0, 0) <= 0.5);
}

TEST_CASE("solver error paths")
{
    CostMap map = uniform_costs(2, 2);
    CHECK_THROWS_AS(solve_lambda(map, 5.0), PayloadError);
    CHECK_THROWS_AS(solve_lambda(map, 0.0), PayloadError);
    CostMap wet;
    wet.rho = ImageF::Constant(2, 2, kInfF);
    CHECK_THROWS_AS(solve_lambda(wet, 1.0), CapacityError);
    // wet pixels do not count toward capacity
    CostMap mixed = uniform_costs(1, 3);
    mixed.rho(0, 2) = kInfF;
    CHECK_THROWS_AS(solve_lambda(mixed, 2.5), PayloadError);
    const EmbeddingPlan plan = solve_lambda(mixed, 2.0);
    CHECK(plan.p(0, 2) == 0.0);
}

TEST_CASE("simulator matches its plan statistics")
{
    SUBCASE("p = 0 gives an empty mask")
    {
        EmbeddingPlan plan;
        plan.p = ImageD::Zero(32, 32);
        CHECK(simulate(plan, 5).cast<int>().sum() == 0);
    }
    SUBCASE("p = 1/2 over 10^6 pixels is binomially concentrated")
    {
        EmbeddingPlan plan;
        plan.p = ImageD::Constant(1000, 1000, 0.5);
        const long flips = simulate(plan, 7).cast<long>().sum();
        CHECK(std::abs(flips - 500000L) < 3 * 500);
    }
    SUBCASE("per-cost-class empirical rates within 3 sigma")
    {
        CostMap map;
        map.rho.resize(200, 200);
        for (Eigen::Index i = 0; i < map.rho.size(); ++i)
            map.rho.data()[i] = (i % 2) ? 1.0f : 3.0f;
        const EmbeddingPlan plan = solve_lambda(map, 8000.0);
        const ImageB mask = simulate(plan, 11);
        for (int cls = 0; cls < 2; ++cls) {
            const double p = plan.p.data()[cls ? 1 : 0];
            long count = 0;
            long total = 0;
            for (Eigen::Index i = 0; i < mask.size(); ++i) {
                if (static_cast<int>(i % 2) == cls) {
                    ++total;
                    count += mask.data()[i];
                }
            }
            const double sigma = std::sqrt(p * (1.0 - p) * static_cast<double>(total));
            CHECK(std::abs(static_cast<double>(count) - p * static_cast<double>(total))
                  < 3.0 * sigma);
        }
    }
    SUBCASE("fixed seed reproduces the mask")
    {
        EmbeddingPlan plan;
        plan.p = ImageD::Constant(64, 64, 0.25);
        const ImageB a = simulate(plan, 99);
        const ImageB b = simulate(plan, 99);
        CHECK((a.cast<int>() - b.cast<int>()).abs().sum() == 0);
    }
}

TEST_CASE("submatrix construction is deterministic with pinned rows")
{
    const StcCode a = StcCode::make(6, 8, 42);
    const StcCode b = StcCode::make(6, 8, 42);
    REQUIRE(a.columns.size() == 8);
    for (std::size_t j = 0; j < 8; ++j) {
        CHECK(a.columns[j] == b.columns[j]);
        CHECK((a.columns[j] & 1u) == 1u);          // first row ones
        CHECK(((a.columns[j] >> 5) & 1u) == 1u);   // last row ones
        CHECK(a.columns[j] < (1u << 6));
    }
    CHECK_THROWS_AS(StcCode::make(0, 4, 1), KeyError);
}

TEST_CASE("stc syndrome identity on random instances")
{
    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 16 + rng() % 200;
        const std::size_t m = 1 + rng() % (n / 2);
        const int h = 2 + static_cast<int>(rng() % 9);
        const StcCode code = StcCode::make(h, static_cast<int>(n / m + 1), rng());
        BitVec cover(n), message(m);
        std::vector<float> costs(n);
        for (auto& c : cover) c = static_cast<std::uint8_t>(rng() & 1u);
        for (auto& b : message) b = static_cast<std::uint8_t>(rng() & 1u);
        for (auto& c : costs) c = 0.01f + static_cast<float>(rng() % 1000) / 100.0f;

        const BitVec stego = stc_encode(cover, costs, message, code);
        const BitVec decoded = stc_decode(stego, code, m);
        REQUIRE(decoded.size() == m);
        for (std::size_t g = 0; g < m; ++g)
            CHECK(decoded[g] == message[g]);
    }
}

TEST_CASE("message already in the coset costs nothing")
{
    std::mt19937_64 rng(31);
    const std::size_t n = 48, m = 12;
    const StcCode code = StcCode::make(5, static_cast<int>(n / m + 1), 77);
    BitVec cover(n);
    std::vector<float> costs(n, 1.0f);
    for (auto& c : cover) c = static_cast<std::uint8_t>(rng() & 1u);
    const BitVec message = stc_decode(cover, code, m);
    const BitVec stego = stc_encode(cover, costs, message, code);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(stego[i] == cover[i]);
}

TEST_CASE("all-zero stego decodes to the all-zero message")
{
    const StcCode code = StcCode::make(4, 6, 3);
    const BitVec zero(30, 0);
    for (std::uint8_t b : stc_decode(zero, code, 6))
        CHECK(b == 0);
}

TEST_CASE("flipping one stego bit flips exactly the rows its column touches")
{
    const std::size_t n = 36, m = 9;
    const StcCode code = StcCode::make(4, static_cast<int>(n / m), 1234);
    const auto rows = dense_parity_rows(code, n, m);
    std::mt19937_64 rng(8);
    BitVec stego(n);
    for (auto& b : stego) b = static_cast<std::uint8_t>(rng() & 1u);
    const BitVec base = stc_decode(stego, code, m);
    for (std::size_t flip = 0; flip < n; ++flip) {
        BitVec mutated = stego;
        mutated[flip] ^= 1u;
        const BitVec changed = stc_decode(mutated, code, m);
        for (std::size_t g = 0; g < m; ++g) {
            const bool touches = (rows[g] >> flip) & 1ull;
            CHECK((changed[g] != base[g]) == touches);
        }
    }
}

TEST_CASE("trellis distortion equals the brute-force coset minimum")
{
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 8 + rng() % 13;  // up to 20
        const std::size_t m = 2 + rng() % (n / 3);
        const int h = 2 + static_cast<int>(rng() % 3);  // up to 4
        const StcCode code = StcCode::make(h, static_cast<int>(n / m + 1), rng());
        BitVec cover(n), message(m);
        std::vector<float> costs(n);
        for (auto& c : cover) c = static_cast<std::uint8_t>(rng() & 1u);
        for (auto& b : message) b = static_cast<std::uint8_t>(rng() & 1u);
        for (auto& c : costs) c = static_cast<float>(1 + rng() % 64);

        const BitVec stego = stc_encode(cover, costs, message, code);
        double trellis = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (stego[i] != cover[i]) trellis += costs[i];

        const auto rows = dense_parity_rows(code, n, m);
        const BitVec check = syndrome_of(rows, to_word(stego));
        for (std::size_t g = 0; g < m; ++g)
            REQUIRE(check[g] == message[g]);

        const double best = coset_minimum(rows, to_word(cover), costs, message, n);
        CHECK(trellis == best);
    }
}

TEST_CASE("wet bits are never flipped; saturation raises")
{
    std::mt19937_64 rng(1001);
    const std::size_t n = 40, m = 10;
    const StcCode code = StcCode::make(4, static_cast<int>(n / m + 1), 9);
    BitVec cover(n);
    for (auto& c : cover) c = static_cast<std::uint8_t>(rng() & 1u);
    std::vector<float> costs(n, 1.0f);
    for (std::size_t i = 0; i < n; i += 3) costs[i] = kInfF;
    BitVec message(m);
    for (auto& b : message) b = static_cast<std::uint8_t>(rng() & 1u);
    const BitVec stego = stc_encode(cover, costs, message, code);
    for (std::size_t i = 0; i < n; ++i)
        if (std::isinf(costs[i])) CHECK(stego[i] == cover[i]);

    // Everything wet and a syndrome mismatch: no path survives.
    std::vector<float> all_wet(n, kInfF);
    const BitVec forced = stc_decode(cover, code, m);
    BitVec other = forced;
    other[0] ^= 1u;
    CHECK_THROWS_AS(stc_encode(cover, all_wet, other, code), CapacityError);
    // but the already-satisfied syndrome passes with zero changes
    const BitVec same = stc_encode(cover, all_wet, forced, code);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(same[i] == cover[i]);
}

TEST_CASE("coding loss stays within 15% of the simulator bound")
{
    // Uniform costs, payload alpha: the rate-distortion bound implied by
    // the simulator is n * p(alpha) flips where h(p) = alpha.
    const std::size_t n = 100000;
    for (const double alpha : {0.25, 0.5}) {
        const std::size_t m = static_cast<std::size_t>(alpha * static_cast<double>(n));

        double lo = 0.0, hi = 0.5;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (binary_entropy(mid) < alpha ? lo : hi) = mid;
        }
        const double bound = static_cast<double>(n) * 0.5 * (lo + hi);

        std::mt19937_64 rng(2718);
        BitVec cover(n), message(m);
        for (auto& c : cover) c = static_cast<std::uint8_t>(rng() & 1u);
        for (auto& b : message) b = static_cast<std::uint8_t>(rng() & 1u);
        std::vector<float> costs(n, 1.0f);
        const StcCode code = StcCode::make(10, static_cast<int>(n / m + 1), 515);
        const BitVec stego = stc_encode(cover, costs, message, code);
        double flips = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (stego[i] != cover[i]) flips += 1.0;
        CHECK(flips <= 1.15 * bound);
    }
}
