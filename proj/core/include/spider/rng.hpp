#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "spider/numerics.hpp"

// Reproducible substream randomness. Every consumer derives its generator as a
// pure function of (master seed, stream id, path id), so results do not depend
// on scheduling or worker count. The derivation is the SplitMix64 finalizer
// applied to seed, then stream id, then path id.

namespace spider {

// Well-known stream ids; anything 64-bit works, these keep call sites readable.
namespace streams {
inline constexpr std::uint64_t kSimulate = 0x01;
inline constexpr std::uint64_t kPenalize = 0x02;
inline constexpr std::uint64_t kLimit = 0x03;
inline constexpr std::uint64_t kSampler = 0x04;
inline constexpr std::uint64_t kPermutation = 0x05;
inline constexpr std::uint64_t kOracle = 0x06;
inline constexpr std::uint64_t kCalibration = 0x07;
}  // namespace streams

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id,
                                 std::uint64_t path_id) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
    s = splitmix64(s ^ (0xC2B2AE3D27D4EB4FULL * (path_id + 1)));
    return s;
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    static RngStream substream(std::uint64_t master, std::uint64_t stream_id,
                               std::uint64_t path_id) {
        return RngStream(derive_seed(master, stream_id, path_id));
    }

    std::uint64_t raw() { return eng_(); }

    // Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

    // Standard normal via Box-Muller on explicit uniforms (deterministic draw order).
    double gauss() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * num::kPi * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Index into a cumulative-free discrete law given by probabilities.
    template <class Vec>
    int discrete(const Vec& probs) {
        double u = uniform();
        double acc = 0.0;
        const int n = static_cast<int>(probs.size());
        for (int i = 0; i < n; ++i) {
            acc += probs[i];
            if (u <= acc) return i;
        }
        return n - 1;
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace spider
