#ifndef HMC_LEAPFROG_HPP
#define HMC_LEAPFROG_HPP

#include <vector>

#include "hmc/metric.hpp"
#include "hmc/phase_point.hpp"
#include "hmc/target.hpp"

namespace hmc {

class StepSize {
 public:
  explicit StepSize(double eps);
  double value() const { return eps_; }

 private:
  double eps_;
};

struct DivergenceConfig {
  double threshold = 1000.0;  // flag when H - H0 exceeds this
};

// true iff H is non-finite or has climbed more than the threshold above H0
bool check_divergence(double H0, double H, const DivergenceConfig& div);

/**
 * One leapfrog step: half momentum kick, full position drift, half kick.
 * Exactly one fresh gradient evaluation (at the new position); the incoming
 * point's cached gradient supplies the first kick. Non-finite intermediates
 * yield a point with energy = +inf rather than an exception, which
 * check_divergence then flags.
 */
PhasePoint leapfrog_step(const Target& target, const Metric& metric,
                         const PhasePoint& z, StepSize eps, int direction);

struct IntegrateResult {
  PhasePoint final_state;
  bool divergent = false;
  int steps = 0;  // steps actually taken
};

// Apply leapfrog_step L times forward, halting early on divergence.
// When states is given, every produced point is appended to it.
IntegrateResult integrate(const Target& target, const Metric& metric,
                          const PhasePoint& z0, StepSize eps, int L,
                          const DivergenceConfig& div,
                          std::vector<PhasePoint>* states = nullptr);

}  // namespace hmc

#endif
