#include "hmc/adapt.hpp"

#include <cmath>
#include <stdexcept>

#include "hmc/leapfrog.hpp"
#include "hmc/phase_point.hpp"
#include "hmc/transition.hpp"

namespace hmc {

namespace {
constexpr double kGamma = 0.05;
constexpr double kT0 = 10.0;
constexpr double kKappa = 0.75;
constexpr double kShrinkPseudo = 5.0;
constexpr double kShrinkScale = 1e-3;
}  // namespace

StepSizeAdaptState step_size_adapt_init(double eps0, double target_accept) {
  if (!(eps0 > 0) || !std::isfinite(eps0))
    throw std::invalid_argument("step_size_adapt_init: eps0 must be positive");
  if (!(target_accept > 0) || !(target_accept < 1))
    throw std::invalid_argument("step_size_adapt_init: target_accept must be in (0,1)");
  StepSizeAdaptState s;
  s.mu = std::log(eps0);
  s.log_eps = s.mu;
  s.log_eps_bar = s.mu;
  s.h_bar = 0;
  s.m = 1;
  s.target_accept = target_accept;
  return s;
}

void update_step_size(StepSizeAdaptState& s, double accept_stat) {
  double m = static_cast<double>(s.m);
  double w = 1.0 / (m + kT0);
  s.h_bar = (1 - w) * s.h_bar + w * (s.target_accept - accept_stat);
  s.log_eps = s.mu - std::sqrt(m) / kGamma * s.h_bar;
  double avg_w = std::pow(m, -kKappa);
  s.log_eps_bar = avg_w * s.log_eps + (1 - avg_w) * s.log_eps_bar;
  ++s.m;
}

double current_step_size(const StepSizeAdaptState& s) { return std::exp(s.log_eps); }

double adapted_step_size(const StepSizeAdaptState& s) { return std::exp(s.log_eps_bar); }

double average_one_step_accept(const Target& target, const Metric& metric,
                               const Eigen::VectorXd& q0, double eps, int n_draws,
                               Rng& rng) {
  double sum = 0;
  for (int k = 0; k < n_draws; ++k) {
    PhasePoint z = lift(target, metric, q0, rng);
    PhasePoint z1 = leapfrog_step(target, metric, z, StepSize(eps), +1);
    sum += accept_probability(z.energy, z1.energy);
  }
  return sum / n_draws;
}

double init_step_size(const Target& target, const Metric& metric,
                      const Eigen::VectorXd& q0, Rng& rng) {
  constexpr int kProbeDraws = 16;
  constexpr double kBound = double(1 << 20);
  double eps = 1.0;
  bool pass = average_one_step_accept(target, metric, q0, eps, kProbeDraws, rng) > 0.5;
  if (pass) {
    while (eps < kBound) {
      double next = 2 * eps;
      if (average_one_step_accept(target, metric, q0, next, kProbeDraws, rng) <= 0.5)
        return eps;
      eps = next;
    }
    return kBound;
  }
  while (eps > 1.0 / kBound) {
    eps /= 2;
    if (average_one_step_accept(target, metric, q0, eps, kProbeDraws, rng) > 0.5)
      return eps;
  }
  throw std::runtime_error(
      "init_step_size: no stable step size above 2^-20; check the target scale");
}

MetricAdaptState metric_adapt_init(MetricForm form, int dim) {
  if (dim < 1) throw std::invalid_argument("metric_adapt_init: dim must be >= 1");
  MetricAdaptState s;
  s.form = form;
  s.n = 0;
  s.mean = Eigen::VectorXd::Zero(dim);
  if (form == MetricForm::Diagonal) s.m2_diag = Eigen::VectorXd::Zero(dim);
  if (form == MetricForm::Dense) s.m2 = Eigen::MatrixXd::Zero(dim, dim);
  return s;
}

void update_metric(MetricAdaptState& s, const Eigen::VectorXd& q) {
  if (q.size() != s.mean.size())
    throw std::invalid_argument("update_metric: dimension mismatch");
  if (s.form == MetricForm::Unit) {
    ++s.n;
    return;
  }
  ++s.n;
  Eigen::VectorXd d = q - s.mean;
  s.mean += d / static_cast<double>(s.n);
  Eigen::VectorXd d2 = q - s.mean;
  if (s.form == MetricForm::Diagonal)
    s.m2_diag += d.cwiseProduct(d2);
  else
    s.m2 += d * d2.transpose();
}

Eigen::MatrixXd adapt_covariance(const MetricAdaptState& s) {
  const auto dim = s.mean.size();
  if (s.n < 2 || s.form == MetricForm::Unit)
    return Eigen::MatrixXd::Zero(dim, dim);
  double denom = static_cast<double>(s.n - 1);
  if (s.form == MetricForm::Diagonal)
    return Eigen::MatrixXd((s.m2_diag / denom).asDiagonal());
  return s.m2 / denom;
}

Metric finalize_metric(const MetricAdaptState& s) {
  if (s.n < 1) throw std::invalid_argument("finalize_metric: no samples accumulated");
  const int dim = static_cast<int>(s.mean.size());
  if (s.form == MetricForm::Unit) return Metric::unit(dim);
  double n = static_cast<double>(s.n);
  double w = n / (n + kShrinkPseudo);
  double reg = (kShrinkPseudo / (n + kShrinkPseudo)) * kShrinkScale;
  if (s.form == MetricForm::Diagonal) {
    Eigen::VectorXd var = s.n >= 2
                              ? Eigen::VectorXd(s.m2_diag / static_cast<double>(s.n - 1))
                              : Eigen::VectorXd::Zero(dim);
    if (!var.allFinite()) throw std::runtime_error("finalize_metric: non-finite accumulator");
    return Metric::from_inverse_diagonal(w * var + Eigen::VectorXd::Constant(dim, reg));
  }
  Eigen::MatrixXd cov = adapt_covariance(s);
  if (!cov.allFinite()) throw std::runtime_error("finalize_metric: non-finite accumulator");
  Eigen::MatrixXd minv = w * cov + reg * Eigen::MatrixXd::Identity(dim, dim);
  return Metric::from_inverse_dense(minv);
}

WarmupSchedule plan_warmup(std::int64_t num_warmup) {
  if (num_warmup < 20)
    throw std::invalid_argument("plan_warmup: need at least 20 warm-up iterations");
  WarmupSchedule s;
  s.total = num_warmup;
  if (num_warmup < 150) {
    // scale the 75/25/50 proportions down
    s.init_fast = num_warmup / 2;
    s.term_fast = num_warmup / 3;
    s.windows.push_back(num_warmup - s.init_fast - s.term_fast);
    return s;
  }
  s.init_fast = 75;
  s.term_fast = 50;
  std::int64_t budget = num_warmup - s.init_fast - s.term_fast;
  std::int64_t used = 0, w = 25;
  while (true) {
    if (used + 3 * w > budget) {  // cannot fit this window plus a doubled one
      s.windows.push_back(budget - used);
      break;
    }
    s.windows.push_back(w);
    used += w;
    w *= 2;
  }
  return s;
}

}  // namespace hmc
