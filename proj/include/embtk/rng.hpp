#pragma once

#include <cstdint>
#include <random>

namespace embtk {

// Seeded generator with hand-rolled draws; std:: distributions are not
// reproducible across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform in [0, n), n > 0.
    int uniform_int(int n) {
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace embtk
