#ifndef HMC_MATH_HPP
#define HMC_MATH_HPP

#include <span>

namespace hmc {

// log(exp(a) + exp(b)) without overflow; tolerates -inf in either slot.
double log_sum_exp(double a, double b);

// log sum exp over a span, max-subtraction form.
double log_sum_exp(std::span<const double> v);

}  // namespace hmc

#endif
