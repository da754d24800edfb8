#pragma once

#include <array>
#include <cstdint>

namespace chirpsim {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
///
/// Stateless: each 128-bit block is a pure function of (key, counter), so
/// Monte Carlo sample k can be drawn on any worker in any order with
/// identical results.
namespace philox {

/// One block with explicit counter and key words.
std::array<std::uint32_t, 4> block_raw(std::array<std::uint32_t, 4> ctr,
                                       std::array<std::uint32_t, 2> key);

/// One keyed block. key = seed split into two 32-bit words; counter words
/// are (k_lo, k_hi, stream, 0).
std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t counter,
                                   std::uint32_t stream = 0);

} // namespace philox

struct GaussianPair {
    double z0 = 0.0;
    double z1 = 0.0;
};

/// Two independent standard normals from Philox block (seed, k, stream)
/// via Box-Muller.  Pure function of its arguments.
GaussianPair gaussian_pair(std::uint64_t seed, std::uint64_t k,
                           std::uint32_t stream = 0);

/// Uniform in [0, 1) from the top 53 bits of two 32-bit words.
double uniform_from_bits(std::uint32_t lo, std::uint32_t hi);

} // namespace chirpsim
