#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dlc {

/// Disorder stream tags. Feature-matrix streams are kTagU + layer index.
inline constexpr std::uint64_t kTagX = 0;
inline constexpr std::uint64_t kTagTeacher = 1;
inline constexpr std::uint64_t kTagNoise = 2;
inline constexpr std::uint64_t kTagU = 3;

/// SplitMix64 finalizer, also usable as a standalone mixing step.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ keyed by (seed, replicate, stream tag). Streams with distinct
/// keys are independent, so replicates and grid points parallelize without
/// correlation; identical keys reproduce the stream bit for bit.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t tag) {
        std::uint64_t key = seed;
        (void)splitmix64(key);
        key ^= 0x6a09e667f3bcc909ULL + replicate;
        (void)splitmix64(key);
        key ^= 0xbb67ae8584caa73bULL + tag;
        for (auto& word : state_) word = splitmix64(key);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on (0, 1]; never returns 0, safe under log.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Fully deterministic given the key.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dlc
