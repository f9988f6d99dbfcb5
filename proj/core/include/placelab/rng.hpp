#pragma once

#include <cstdint>
#include <random>

namespace placelab {

/// Seeded random source with draw functions that are bit-stable across
/// platforms. std::mt19937_64 is fully specified by the standard; the
/// distribution helpers here avoid std::uniform_*_distribution, whose
/// output sequences are implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be >= 1.
    std::size_t next_index(std::size_t n) {
        const std::uint64_t bound = n;
        // Rejection below the wraparound threshold keeps the draw unbiased.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) {
                return static_cast<std::size_t>(r % bound);
            }
        }
    }

    /// Uniform double in [lo, hi).
    double next_real(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    /// Bernoulli draw; p >= 1 always succeeds, p <= 0 never does.
    bool next_bool(double p) {
        if (p >= 1.0) {
            return true;
        }
        return next_unit() < p;
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace placelab
