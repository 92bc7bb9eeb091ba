#include "hdrsteg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace hdrsteg {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag)
{
    return splitmix64(seed ^ splitmix64(tag));
}

// Stream tags for the independent RNG roles derived from perm_seed.
constexpr std::uint64_t kTagPermBase = 0x7065726d00000000ull;
constexpr std::uint64_t kTagPadding = 0x7061640000000000ull;
constexpr std::uint64_t kTagStc = 0x7374630000000000ull;
constexpr std::uint64_t kTagSimBase = 0x73696d0000000000ull;

std::vector<std::uint32_t> keyed_permutation(std::size_t n, std::uint64_t seed)
{
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::mt19937_64 rng(seed);
    // Fisher-Yates with explicit modulo draw keeps the permutation
    // identical across standard library implementations.
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

BitVec frame_message(const BitVec& message, std::size_t total_bits, const StegoKey& key)
{
    if (!key.framing) {
        if (message.size() != total_bits)
            throw PayloadError("embed: unframed message must fill the quota exactly");
        return message;
    }
    if (message.size() + 32 > total_bits)
        throw PayloadError("embed: message exceeds payload quota");
    BitVec stream;
    stream.reserve(total_bits);
    const std::uint32_t len = static_cast<std::uint32_t>(message.size());
    for (int b = 31; b >= 0; --b)
        stream.push_back(static_cast<std::uint8_t>((len >> b) & 1u));
    stream.insert(stream.end(), message.begin(), message.end());
    std::mt19937_64 pad(mix_seed(key.perm_seed, kTagPadding));
    while (stream.size() < total_bits)
        stream.push_back(static_cast<std::uint8_t>(pad() & 1u));
    return stream;
}

BitVec unframe_message(const BitVec& stream, const StegoKey& key)
{
    if (!key.framing)
        return stream;
    if (stream.size() < 32)
        throw KeyError("extract: stream too short for framing header");
    std::uint32_t len = 0;
    for (int b = 0; b < 32; ++b)
        len = (len << 1) | (stream[static_cast<std::size_t>(b)] & 1u);
    if (len > stream.size() - 32)
        throw KeyError("extract: framed length exceeds decoded stream");
    return BitVec(stream.begin() + 32, stream.begin() + 32 + len);
}

int max_threads()
{
    if (const char* env = std::getenv("HDRSTEG_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

template <typename Fn>
void for_each_plane(int k_planes, Fn&& fn)
{
    const int threads = std::min(max_threads(), k_planes);
    if (threads <= 1) {
        for (int k = 1; k <= k_planes; ++k) fn(k);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int k = t + 1; k <= k_planes; k += threads) fn(k);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::string StegoKey::serialize() const
{
    char payload[64];
    std::snprintf(payload, sizeof payload, "%.17g", relative_payload);
    std::ostringstream out;
    out << "key_version " << version << '\n'
        << "relative_payload " << payload << '\n'
        << "planes " << planes << '\n'
        << "cost_model " << cost_model_name(model) << '\n'
        << "stc_h " << stc_h << '\n'
        << "perm_seed " << perm_seed << '\n'
        << "framing " << (framing ? 1 : 0) << '\n';
    return out.str();
}

StegoKey StegoKey::parse(const std::string& text)
{
    std::istringstream in(text);
    StegoKey key;
    std::string field, value;
    auto next = [&](const std::string& name) {
        if (!(in >> field >> value) || field != name)
            throw KeyError("key file: expected field '" + name + "'");
        return value;
    };
    key.version = std::stoi(next("key_version"));
    if (key.version != 1)
        throw KeyError("key file: unsupported version");
    key.relative_payload = std::stod(next("relative_payload"));
    key.planes = std::stoi(next("planes"));
    key.model = cost_model_from_name(next("cost_model"));
    key.stc_h = std::stoi(next("stc_h"));
    key.perm_seed = std::stoull(next("perm_seed"));
    key.framing = next("framing") == "1";
    if (!(key.relative_payload > 0.0 && key.relative_payload < 1.0))
        throw KeyError("key file: relative_payload out of (0,1)");
    if (key.planes < 1)
        throw KeyError("key file: planes must be >= 1");
    if (key.stc_h < 1 || key.stc_h > 31)
        throw KeyError("key file: stc_h out of range");
    return key;
}

void StegoKey::save(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write key file: " + path);
    out << serialize();
}

StegoKey StegoKey::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read key file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

std::vector<std::size_t> split_quota(std::size_t m, int k)
{
    if (k < 1)
        throw PayloadError("split_quota: plane count must be >= 1");
    const std::size_t base = m / static_cast<std::size_t>(k);
    const std::size_t extra = m % static_cast<std::size_t>(k);
    std::vector<std::size_t> quotas(static_cast<std::size_t>(k), base);
    for (std::size_t i = 0; i < extra; ++i) ++quotas[i];
    return quotas;
}

std::size_t plane_quota(const StegoKey& key, Eigen::Index pixels)
{
    return static_cast<std::size_t>(
        std::floor(key.relative_payload * static_cast<double>(pixels)));
}

CostMap embedding_costs(const ImageF& cover, const StegoKey& key)
{
    return correct(cost(cover, key.model), cover);
}

ImageF embed(const ImageF& cover, const BitVec& message, const StegoKey& key)
{
    if (message.empty())
        return cover;
    const CapacityMap cap = capacity(cover);
    if (cap.n_x == 0)
        throw MalformedCoverError("embed: unsuitable cover (n_x = 0)");
    if (key.planes > cap.n_x)
        throw CapacityError("embed: planes exceed cover capacity n_x");

    const std::size_t pixels = static_cast<std::size_t>(cover.size());
    const std::size_t quota = plane_quota(key, cover.size());
    if (quota == 0)
        throw PayloadError("embed: per-plane quota is zero");
    const std::size_t total = quota * static_cast<std::size_t>(key.planes);
    const BitVec stream = frame_message(message, total, key);

    const CostMap costs = embedding_costs(cover, key);
    PlaneStack stack = extract_planes(cover, cap, key.planes);

    const std::size_t max_w = pixels / quota + (pixels % quota ? 1 : 0);
    const StcCode code = StcCode::make(
        key.stc_h, static_cast<int>(max_w),
        mix_seed(key.perm_seed, kTagStc + static_cast<std::uint64_t>(key.stc_h)));

    for_each_plane(key.planes, [&](int k) {
        const auto perm = keyed_permutation(
            pixels, mix_seed(key.perm_seed, kTagPermBase + static_cast<std::uint64_t>(k)));
        ImageB& plane = stack.planes[static_cast<std::size_t>(k - 1)];
        BitVec cover_bits(pixels);
        std::vector<float> plane_costs(pixels);
        for (std::size_t t = 0; t < pixels; ++t) {
            cover_bits[t] = plane.data()[perm[t]];
            plane_costs[t] = costs.rho.data()[perm[t]];
        }
        const std::size_t off = static_cast<std::size_t>(k - 1) * quota;
        const BitVec chunk(stream.begin() + static_cast<std::ptrdiff_t>(off),
                           stream.begin() + static_cast<std::ptrdiff_t>(off + quota));
        const BitVec stego_bits = stc_encode(cover_bits, plane_costs, chunk, code);
        for (std::size_t t = 0; t < pixels; ++t)
            plane.data()[perm[t]] = stego_bits[t];
    });

    return write_planes(cover, stack);
}

BitVec extract(const ImageF& stego, const StegoKey& key)
{
    const CapacityMap cap = capacity(stego);
    if (key.planes > cap.n_x)
        throw KeyError("extract: key plane count exceeds stego capacity");

    const std::size_t pixels = static_cast<std::size_t>(stego.size());
    const std::size_t quota = plane_quota(key, stego.size());
    if (quota == 0)
        throw PayloadError("extract: per-plane quota is zero");

    const PlaneStack stack = extract_planes(stego, cap, key.planes);
    const std::size_t max_w = pixels / quota + (pixels % quota ? 1 : 0);
    const StcCode code = StcCode::make(
        key.stc_h, static_cast<int>(max_w),
        mix_seed(key.perm_seed, kTagStc + static_cast<std::uint64_t>(key.stc_h)));

    BitVec stream(quota * static_cast<std::size_t>(key.planes));
    for_each_plane(key.planes, [&](int k) {
        const auto perm = keyed_permutation(
            pixels, mix_seed(key.perm_seed, kTagPermBase + static_cast<std::uint64_t>(k)));
        const ImageB& plane = stack.planes[static_cast<std::size_t>(k - 1)];
        BitVec stego_bits(pixels);
        for (std::size_t t = 0; t < pixels; ++t)
            stego_bits[t] = plane.data()[perm[t]];
        const BitVec chunk = stc_decode(stego_bits, code, quota);
        std::copy(chunk.begin(), chunk.end(),
                  stream.begin() + static_cast<std::ptrdiff_t>(k - 1) * static_cast<std::ptrdiff_t>(quota));
    });

    return unframe_message(stream, key);
}

std::pair<ImageF, ImageB> simulate_embed(const ImageF& cover, std::size_t message_bits,
                                         const StegoKey& key, std::uint64_t seed)
{
    ImageB any_mask = ImageB::Zero(cover.rows(), cover.cols());
    if (message_bits == 0)
        return {cover, any_mask};

    const CapacityMap cap = capacity(cover);
    if (cap.n_x == 0)
        throw MalformedCoverError("simulate_embed: unsuitable cover (n_x = 0)");
    if (key.planes > cap.n_x)
        throw CapacityError("simulate_embed: planes exceed cover capacity n_x");

    const double per_plane = static_cast<double>(message_bits) / key.planes;
    const CostMap costs = embedding_costs(cover, key);
    const EmbeddingPlan plan = solve_lambda(costs, per_plane);

    PlaneStack stack = extract_planes(cover, cap, key.planes);
    for (int k = 1; k <= key.planes; ++k) {
        const ImageB mask =
            simulate(plan, mix_seed(seed, kTagSimBase + static_cast<std::uint64_t>(k)));
        ImageB& plane = stack.planes[static_cast<std::size_t>(k - 1)];
        for (Eigen::Index t = 0; t < plane.size(); ++t) {
            plane.data()[t] = static_cast<std::uint8_t>(plane.data()[t] ^ mask.data()[t]);
            any_mask.data()[t] = std::max(any_mask.data()[t], mask.data()[t]);
        }
    }
    return {write_planes(cover, stack), any_mask};
}

}  // namespace hdrsteg
