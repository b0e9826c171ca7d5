#pragma once

#include <cmath>
#include <cstdint>
#include <complex>

namespace rcsw {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives a stream seed from a master seed plus up to three stream labels.
/// Streams with distinct labels are statistically independent, so scans,
/// chirps and repeats can be generated in any order (or in parallel) while
/// staying bit-reproducible.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t purpose,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= purpose * 0xD1342543DE82EF95ULL;
    h ^= splitmix64(s);
    s ^= a * 0xDB4F0B9175AE2165ULL;
    h ^= splitmix64(s);
    s ^= b * 0xA0761D6478BD642FULL;
    h ^= splitmix64(s);
    return h;
}

// Stream purposes used across the workbench.
enum : std::uint64_t {
    kStreamNoise = 1,
    kStreamClutter = 2,
    kStreamClutterJitter = 5,
    kStreamGodec = 3,
    kStreamRepeat = 4,
    kStreamTest = 99,
};

/// xoshiro256++ generator. Small, fast, and identical on every platform,
/// unlike the distributions in <random>.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1]; never returns 0 so log() is safe.
    double uniform_pos() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal pair via Box-Muller (portable, reproducible).
    void normal_pair(double& z0, double& z1) {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        z0 = r * std::cos(a);
        z1 = r * std::sin(a);
    }

    double normal() {
        double z0, z1;
        normal_pair(z0, z1);
        return z0;
    }

    /// Circularly-symmetric complex normal with unit variance per component.
    std::complex<double> complex_normal() {
        double z0, z1;
        normal_pair(z0, z1);
        return {z0, z1};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace rcsw
