#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace reoi {

/// Deterministic xoshiro256** generator with splitmix64 seeding.
/// The standard <random> distributions are implementation-defined, so all
/// draws used in experiments go through this type to keep datasets and
/// reports byte-reproducible.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    uint64_t next_u64() {
        uint64_t result = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    uint64_t uniform_int(uint64_t n) { return next_u64() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller.
    double gauss() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

/// FNV-1a, used to fold purpose tags into derived seeds.
inline uint64_t hash_tag(std::string_view tag) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= uint8_t(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stream seed for (global_seed, episode_index, purpose_tag).
inline Rng derive_rng(uint64_t global_seed, uint64_t index, std::string_view tag) {
    uint64_t x = global_seed;
    uint64_t a = Rng::splitmix64(x);
    x ^= index * 0x9e3779b97f4a7c15ULL;
    uint64_t b = Rng::splitmix64(x);
    return Rng(a ^ (b + hash_tag(tag)));
}

}  // namespace reoi
