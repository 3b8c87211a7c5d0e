#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. 2011).
// A draw is addressed by (seed, particle, channel, step): the value depends
// only on that key, never on scheduling or call order, which is what makes
// trajectories bit-reproducible across thread counts and lets coupled and
// uncoupled runs replay identical randomness.

#include <array>
#include <cmath>
#include <cstdint>

namespace fhn {

namespace philox {

inline constexpr uint32_t kMul0 = 0xD2511F53u;
inline constexpr uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                     std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const uint64_t p0 = uint64_t(kMul0) * ctr[0];
        const uint64_t p1 = uint64_t(kMul1) * ctr[2];
        const std::array<uint32_t, 4> next{uint32_t(p1 >> 32) ^ ctr[1] ^ key[0],
                                           uint32_t(p1),
                                           uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
                                           uint32_t(p0)};
        ctr = next;
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

} // namespace philox

// Noise channels. Channel 0 doubles as the plain X stream and the
// synchronous/sc part of the X split; channel 2 likewise for C. The spare
// channel carries the reflection split of C (Appendix-B coupling) and, at
// step 2^64-1, the initial-condition draws.
enum class NoiseChannel : uint32_t {
    sc_x = 0,
    rc_x = 1,
    c = 2,
    spare = 3,
};

inline constexpr uint64_t kInitStep = ~uint64_t(0);

struct GaussPair {
    double z0;
    double z1;
};

// Uniform in (0,1) from 64 random bits; odd multiples of 2^-53 never hit
// the endpoints.
inline double bits_to_u01(uint64_t bits) {
    return double((bits >> 11) | 1u) * 0x1.0p-53;
}

// Two standard normals for the given key, via Box-Muller on one block.
inline GaussPair gauss_pair(uint64_t seed, uint32_t particle, NoiseChannel channel,
                            uint64_t step) {
    const std::array<uint32_t, 4> ctr{particle, static_cast<uint32_t>(channel),
                                      uint32_t(step), uint32_t(step >> 32)};
    const std::array<uint32_t, 2> key{uint32_t(seed), uint32_t(seed >> 32)};
    const auto w = philox::block(ctr, key);
    const double u1 = bits_to_u01(uint64_t(w[0]) << 32 | w[1]);
    const double u2 = bits_to_u01(uint64_t(w[2]) << 32 | w[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

inline double gaussian(uint64_t seed, uint32_t particle, NoiseChannel channel,
                       uint64_t step) {
    return gauss_pair(seed, particle, channel, step).z0;
}

// Documented replica policy: replica k runs with seed ⊕ (k · golden64).
inline uint64_t replica_seed(uint64_t seed, uint64_t replica_index) {
    return seed ^ (0x9E3779B97F4A7C15ull * replica_index);
}

} // namespace fhn
