#include "hmc/rng.hpp"

#include <cmath>
#include <numbers>

namespace hmc {

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // u1 in (0,1] so the log is finite
  double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

Rng chain_rng(std::uint64_t seed, int chain) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ (static_cast<std::uint64_t>(chain) + 1));
  return Rng(s);
}

}  // namespace hmc
