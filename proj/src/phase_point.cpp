#include "hmc/phase_point.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hmc {

PhasePoint make_phase_point(const Target& target, const Metric& metric,
                            Eigen::VectorXd q, Eigen::VectorXd p) {
  PhasePoint z;
  z.potential = -target.log_density(q);
  z.grad_potential = -target.grad_log_density(q);
  z.energy = z.potential + metric.kinetic_energy(p);
  z.q = std::move(q);
  z.p = std::move(p);
  return z;
}

PhasePoint lift(const Target& target, const Metric& metric,
                const Eigen::VectorXd& q, Rng& rng) {
  if (!std::isfinite(target.log_density(q)))
    throw std::runtime_error("lift: log density is not finite at the start position");
  return make_phase_point(target, metric, q, metric.sample_momentum(rng));
}

}  // namespace hmc
