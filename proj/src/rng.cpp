#include "chirpsim/rng.hpp"

#include <cmath>

#include "chirpsim/constants.hpp"

namespace chirpsim {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         const std::array<std::uint32_t, 2>& key) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kPhiloxM0, ctr[0], hi0, lo0);
    mul_hi_lo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

} // namespace

namespace philox {

std::array<std::uint32_t, 4> block_raw(std::array<std::uint32_t, 4> ctr,
                                       std::array<std::uint32_t, 2> key) {
    philox_round(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
        philox_round(ctr, key);
    }
    return ctr;
}

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t counter,
                                   std::uint32_t stream) {
    return block_raw({static_cast<std::uint32_t>(counter),
                      static_cast<std::uint32_t>(counter >> 32), stream, 0u},
                     {static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32)});
}

} // namespace philox

double uniform_from_bits(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t v =
        (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
    return static_cast<double>(v >> 11) * 0x1.0p-53;
}

GaussianPair gaussian_pair(std::uint64_t seed, std::uint64_t k,
                           std::uint32_t stream) {
    const auto r = philox::block(seed, k, stream);
    // 1-u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform_from_bits(r[0], r[1]);
    const double u2 = uniform_from_bits(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * constants::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

} // namespace chirpsim
