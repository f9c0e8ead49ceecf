#include "hmc/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmc {

double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a) && a < 0) return a;  // both -inf
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (std::isinf(m) && m < 0) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace hmc
