#ifndef LIAPLAB_RNG_HPP
#define LIAPLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace liaplab {

/// Seeded 64-bit PRNG for the randomized suites. The uniform mapping is done
/// by hand (53-bit mantissa fill) because std::uniform_real_distribution is
/// implementation-defined and the harness promises byte-identical outputs for
/// identical seeds.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in [-1, 1).
    double symmetric() { return uniform(-1.0, 1.0); }

  private:
    std::mt19937_64 gen_;
};

} // namespace liaplab

#endif
