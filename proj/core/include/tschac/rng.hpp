#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace tschac {

/// Named, seedable random stream.
///
/// Generator family (fixed): std::mt19937_64, whose output sequence is pinned
/// by the C++ standard. The engine seed is SplitMix64(seed ^ FNV-1a-64(stream_id)),
/// so every (seed, stream_id) pair gets its own independent sequence and draws
/// on one stream never shift another. Uniform and normal variates are derived
/// here from raw 64-bit outputs instead of <random> distributions, whose
/// algorithms are implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();

    /// Gaussian via Box-Muller; the second variate of each pair is cached.
    double normal(double mean, double stddev);

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& stream_id() const noexcept { return stream_id_; }

private:
    std::uint64_t seed_;
    std::string stream_id_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

RngStream make_rng(std::uint64_t seed, std::string_view stream_id);

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tschac
