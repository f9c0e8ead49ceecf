#include "hmc/leapfrog.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmc {

StepSize::StepSize(double eps) : eps_(eps) {
  if (!(eps > 0) || !std::isfinite(eps))
    throw std::invalid_argument("step size must be positive and finite");
}

bool check_divergence(double H0, double H, const DivergenceConfig& div) {
  if (!std::isfinite(H)) return true;
  return H - H0 > div.threshold;
}

PhasePoint leapfrog_step(const Target& target, const Metric& metric,
                         const PhasePoint& z, StepSize eps, int direction) {
  if (direction != 1 && direction != -1)
    throw std::invalid_argument("leapfrog direction must be +1 or -1");
  const double e = direction * eps.value();

  Eigen::VectorXd p_half = z.p - 0.5 * e * z.grad_potential;
  Eigen::VectorXd q_new = z.q + e * metric.velocity(p_half);

  if (!q_new.allFinite() || !p_half.allFinite()) {
    // flagged result: carry what we have, poison the energy
    PhasePoint bad;
    bad.q = q_new;
    bad.p = p_half;
    bad.potential = std::numeric_limits<double>::infinity();
    bad.grad_potential = Eigen::VectorXd::Zero(z.q.size());
    bad.energy = std::numeric_limits<double>::infinity();
    return bad;
  }

  PhasePoint out;
  try {
    out.potential = -target.log_density(q_new);
    out.grad_potential = -target.grad_log_density(q_new);  // the one fresh gradient
  } catch (const std::domain_error&) {
    // e.g. beta_family landing exactly on its kink: flag, don't crash
    out.q = std::move(q_new);
    out.p = std::move(p_half);
    out.potential = std::numeric_limits<double>::infinity();
    out.grad_potential = Eigen::VectorXd::Zero(out.q.size());
    out.energy = std::numeric_limits<double>::infinity();
    return out;
  }
  out.p = p_half - 0.5 * e * out.grad_potential;
  out.q = std::move(q_new);
  out.energy = out.p.allFinite()
                   ? out.potential + metric.kinetic_energy(out.p)
                   : std::numeric_limits<double>::infinity();
  return out;
}

IntegrateResult integrate(const Target& target, const Metric& metric,
                          const PhasePoint& z0, StepSize eps, int L,
                          const DivergenceConfig& div,
                          std::vector<PhasePoint>* states) {
  if (L < 1) throw std::invalid_argument("integrate: L must be >= 1");
  IntegrateResult res;
  res.final_state = z0;
  const double H0 = z0.energy;
  for (int n = 0; n < L; ++n) {
    res.final_state = leapfrog_step(target, metric, res.final_state, eps, +1);
    ++res.steps;
    if (states) states->push_back(res.final_state);
    if (check_divergence(H0, res.final_state.energy, div)) {
      res.divergent = true;
      break;
    }
  }
  return res;
}

}  // namespace hmc
