#pragma once

#include <cstdint>
#include <random>

namespace eetsne {

// Deterministic random source.  std::mt19937_64 has a fixed bitstream, but
// the standard distribution adaptors are implementation-defined, so the
// uniform/gaussian transforms are spelled out here to keep results
// byte-identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform on (0, 1]; safe to pass through log().
    double uniform_pos() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; generates pairs, caches the spare.
    double gaussian();

    // Uniform integer in [lo, hi] by rejection (unbiased).
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace eetsne
