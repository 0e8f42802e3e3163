// Deterministic random number generation for the simulation harness.
// xoshiro256++ seeded through splitmix64, so that streams derived from
// (seed, direction, rep) are stable across platforms, runs and thread
// counts. Not exposed through the C interface.
#pragma once

#include <cmath>
#include <cstdint>

namespace psirmon {

inline uint64_t splitmix64(uint64_t &state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto &word : state_) word = splitmix64(sm);
    }

    // Stream keyed by up to three indices; distinct keys give independent
    // streams for practical purposes (each index is absorbed through the
    // splitmix64 mixer before seeding).
    static Rng stream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
        uint64_t sm = seed;
        uint64_t key = splitmix64(sm);
        sm ^= a * 0xd1b54a32d192ed03ull;
        key ^= splitmix64(sm);
        sm ^= b * 0x8cb92ba72f3d8dd7ull;
        key ^= splitmix64(sm);
        sm ^= c * 0xa24baed4963ee407ull;
        key ^= splitmix64(sm);
        return Rng(key);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1); never returns 0 so logs are safe.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. The sine mate is discarded so every
    // draw consumes exactly two uniforms, keeping sequences predictable.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4];
};

} // namespace psirmon
