#ifndef HMC_PHASE_POINT_HPP
#define HMC_PHASE_POINT_HPP

#include <Eigen/Dense>

#include "hmc/metric.hpp"
#include "hmc/rng.hpp"
#include "hmc/target.hpp"

namespace hmc {

/**
 * One point z = (q, p) on phase space with cached potential, gradient and
 * total energy. The tree sampler keeps boundary points around and the cost
 * model is gradient-dominated, so everything derived is computed once.
 */
struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  double potential = 0.0;               // V(q) = -log pi(q)
  Eigen::VectorXd grad_potential;       // dV/dq
  double energy = 0.0;                  // H = V + K
};

PhasePoint make_phase_point(const Target& target, const Metric& metric,
                            Eigen::VectorXd q, Eigen::VectorXd p);

// Lift a position into phase space with a fresh momentum draw.
// Throws std::runtime_error when log pi(q) is not finite.
PhasePoint lift(const Target& target, const Metric& metric,
                const Eigen::VectorXd& q, Rng& rng);

}  // namespace hmc

#endif
