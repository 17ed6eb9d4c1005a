#pragma once

#include <cstdint>

namespace dlasso {

// Role tags keep the substreams used for different purposes disjoint even
// when they share (seed, stream index).
enum class RngRole : std::uint64_t {
    Design = 1,
    Noise = 2,
    Support = 3,
    Split = 4,
    Search = 5,
};

// Counter-style splittable generator: the state is derived from
// (seed, stream, role) through three rounds of the SplitMix64 finalizer, and
// the sequence itself is SplitMix64. Streams for distinct replicates are
// statistically independent, so Monte-Carlo loops can hand one stream to each
// replicate and stay bit-reproducible at any thread count.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream, RngRole role);

    std::uint64_t next_u64();

    // Uniform on [0,1) with 53 random bits.
    double uniform01();

    // Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n);

    // Standard normal via Box-Muller; the antithetic partner is cached.
    double normal();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dlasso
