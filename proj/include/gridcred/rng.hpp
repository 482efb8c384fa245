#pragma once

#include <cmath>
#include <cstdint>

namespace gridcred {

// Counter-based generator: output i of stream s under seed k is a pure
// function mix(k, s, i). Substreams can be evaluated in any order or in
// parallel and still produce identical sequences, which is what makes
// multi-threaded scenario sampling reproducible.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(derive_key(seed, stream)) {}

    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
        return mix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
    }

    std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ull * (++counter_)); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Inclusive integer range.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Box-Muller; consumes two uniforms per call, no cached spare, so the
    // draw count per call is fixed and the stream stays reproducible.
    double normal(double mu, double sigma) {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

  private:
    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace gridcred
