#ifndef HMC_ADAPT_HPP
#define HMC_ADAPT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hmc/metric.hpp"
#include "hmc/rng.hpp"
#include "hmc/target.hpp"

namespace hmc {

// stochastic approximation on log step size with iterate averaging
struct StepSizeAdaptState {
  double mu = 0;           // shrinkage anchor, log of the initial step size
  double log_eps = 0;      // current iterate
  double log_eps_bar = 0;  // averaged iterate, used after freezing
  double h_bar = 0;        // smoothed error statistic
  std::int64_t m = 1;
  double target_accept = 0.8;
};

StepSizeAdaptState step_size_adapt_init(double eps0, double target_accept = 0.8);
void update_step_size(StepSizeAdaptState& state, double accept_stat);
double current_step_size(const StepSizeAdaptState& state);
double adapted_step_size(const StepSizeAdaptState& state);

// mean one-step acceptance probability over n fresh momentum draws
double average_one_step_accept(const Target& target, const Metric& metric,
                               const Eigen::VectorXd& q0, double eps, int n_draws,
                               Rng& rng);

// doubles or halves from 1 until the averaged one-step acceptance crosses 1/2,
// returning the last step size on the passing side; bounded by 2^±20
double init_step_size(const Target& target, const Metric& metric,
                      const Eigen::VectorXd& q0, Rng& rng);

// one-pass mean/covariance accumulator for metric windows
struct MetricAdaptState {
  MetricForm form = MetricForm::Diagonal;
  std::int64_t n = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd m2_diag;  // diagonal mode
  Eigen::MatrixXd m2;       // dense mode
};

MetricAdaptState metric_adapt_init(MetricForm form, int dim);
void update_metric(MetricAdaptState& state, const Eigen::VectorXd& q);

// sample covariance with n-1 normalization (zero matrix when n < 2)
Eigen::MatrixXd adapt_covariance(const MetricAdaptState& state);

// shrunk inverse metric (n/(n+5))·cov + (5/(n+5))·1e-3·I in the state's form
Metric finalize_metric(const MetricAdaptState& state);

struct WarmupSchedule {
  std::int64_t init_fast = 0;
  std::vector<std::int64_t> windows;
  std::int64_t term_fast = 0;
  std::int64_t total = 0;
};

// 75 / doubling windows from 25 / 50 for budgets >= 150, proportional below;
// the last window absorbs the remainder so the intervals partition exactly
WarmupSchedule plan_warmup(std::int64_t num_warmup);

}  // namespace hmc

#endif
