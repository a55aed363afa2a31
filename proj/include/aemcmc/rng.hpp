#pragma once

// Deterministic random number streams. Every consumer (chain, exchange
// schedule, data generator, ...) gets its own stream derived from the
// master seed through a fixed splitmix64 mixing function, so results are
// bit-reproducible and independent of how work is scheduled.
//
// Variates are generated from raw mt19937_64 output rather than
// std::*_distribution, whose sequences are implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace aemcmc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Fixed seed-splitting function: documented contract, do not change
// (identical (seed, purpose, index) must yield identical streams across
// builds and platforms).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose,
                                 std::uint64_t index = 0) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= 0xD1B54A32D192ED03ULL * (purpose + 1);
    (void)splitmix64(s);
    s ^= 0x8CB92BA72F3D8DD7ULL * (index + 1);
    return splitmix64(s);
}

// Stream purposes (salt values for derive_seed).
namespace stream {
inline constexpr std::uint64_t kRepeat = 1;    // master -> per-repeat seed
inline constexpr std::uint64_t kChain = 2;     // repeat seed -> per-chain stream
inline constexpr std::uint64_t kExchange = 3;  // repeat seed -> exchange-move stream
inline constexpr std::uint64_t kAlphas = 4;    // repeat seed -> toy alpha draw
inline constexpr std::uint64_t kData = 5;      // master -> synthetic data generation
inline constexpr std::uint64_t kInit = 6;      // repeat seed -> state initialization
}  // namespace stream

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1), 53-bit resolution.
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n) by rejection.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    bool bernoulli(double p) { return u01() < p; }

    // Box-Muller with a cached spare.
    double normal(double mean = 0.0, double sd = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + sd * spare_;
        }
        const double u1 = 1.0 - u01();  // (0, 1]
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return mean + sd * r * std::cos(theta);
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace aemcmc
