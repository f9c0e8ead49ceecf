#ifndef HMC_RNG_HPP
#define HMC_RNG_HPP

#include <cstdint>
#include <random>

namespace hmc {

/**
 * Deterministic random stream for one chain.
 *
 * mt19937_64 supplies the bits; the mappings to doubles are written out
 * explicitly because the std::*_distribution adaptors are free to differ
 * between standard library implementations, which would break the
 * reproducibility contract of run().
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform on [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // standard normal, Box-Muller on (0,1] uniforms; pairs cached
  double normal();

  // uniform on {0, ..., n-1}, n >= 1
  std::int64_t uniform_int(std::int64_t n) {
    using u128 = unsigned __int128;
    return static_cast<std::int64_t>(
        (u128(engine_()) * u128(n)) >> 64);
  }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Independent substream for one chain of a seeded run.
Rng chain_rng(std::uint64_t seed, int chain);

}  // namespace hmc

#endif
