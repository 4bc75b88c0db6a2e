#pragma once

#include <cstdint>
#include <random>

namespace walras {

/// Uniform draws built directly on mt19937_64 bits, so sequences are the
/// same with every standard library.
class UniformDraw {
public:
    explicit UniformDraw(std::uint64_t seed) : rng_(seed) {}

    /// [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    /// [lo, hi], inclusive
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    std::uint64_t bits() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

}  // namespace walras
