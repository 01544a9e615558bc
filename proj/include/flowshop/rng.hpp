#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace flowshop {

// Single seeded random stream. Every stochastic component draws from one Rng
// owned by its run, so identical seeds replay identical runs. The uniform
// helpers are implemented here (not via std::*_distribution) to make the
// draw sequence independent of the standard library in use.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, bound). bound must be >= 1.
    std::size_t index(std::size_t bound) {
        const std::uint64_t n = bound;
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return static_cast<std::size_t>(r % n);
        }
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace flowshop
