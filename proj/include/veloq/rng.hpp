#pragma once

#include <cmath>
#include <cstdint>

namespace veloq {

// Counter-based RNG: one master seed per run, independent streams derived per
// shot index. Stream derivation and output are fixed arithmetic (no library
// distributions), so results are identical across platforms and thread counts.
class ShotRng {
public:
    ShotRng(std::uint64_t seed, std::uint64_t shot) {
        // splitmix64 of (seed, shot) seeds a xoshiro256** state
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (shot + 1);
        for (auto& w : s_) {
            z += 0x9E3779B97F4A7C15ULL;
            std::uint64_t t = z;
            t = (t ^ (t >> 30)) * 0xBF58476D1CE4E5B9ULL;
            t = (t ^ (t >> 27)) * 0x94D049BB133111EBULL;
            w = t ^ (t >> 31);
        }
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        // rejection-free modulo is fine at our n << 2^64
        return next_u64() % n;
    }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(6.283185307179586476925287 * u2);
        have_cached_ = true;
        return r * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace veloq
