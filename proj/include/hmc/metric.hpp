#ifndef HMC_METRIC_HPP
#define HMC_METRIC_HPP

#include <Eigen/Dense>

#include "hmc/rng.hpp"

namespace hmc {

enum class MetricForm { Unit, Diagonal, Dense };

/**
 * Euclidean metric M for the Gaussian kinetic energy K(p) = p' M^{-1} p / 2.
 *
 * Holds whichever triangular factor the construction path provides: a dense
 * metric given as M stores chol(M), one given as M^{-1} (the adapted target
 * covariance) stores chol(M^{-1}). Every operation works off a factor, so no
 * explicit matrix inversion happens anywhere.
 */
class Metric {
 public:
  static Metric unit(int dim);
  static Metric diagonal(const Eigen::VectorXd& d);                 // d = diag(M)
  static Metric dense(const Eigen::MatrixXd& m);                    // M itself
  static Metric from_inverse_diagonal(const Eigen::VectorXd& dinv); // diag(M^{-1})
  static Metric from_inverse_dense(const Eigen::MatrixXd& minv);    // M^{-1}

  int dim() const { return dim_; }
  MetricForm form() const { return form_; }

  double kinetic_energy(const Eigen::VectorXd& p) const;
  Eigen::VectorXd velocity(const Eigen::VectorXd& p) const;  // M^{-1} p
  Eigen::VectorXd sample_momentum(Rng& rng) const;           // Normal(0, M)

  // diag(M^{-1}) or full M^{-1}, for reporting the adapted metric
  Eigen::VectorXd inverse_diagonal() const;
  Eigen::MatrixXd inverse_dense() const;

 private:
  Metric() = default;
  void check_dim(const Eigen::VectorXd& p) const;

  MetricForm form_ = MetricForm::Unit;
  int dim_ = 0;
  Eigen::VectorXd inv_diag_;   // diagonal form: 1/diag(M)
  Eigen::VectorXd sqrt_diag_;  // diagonal form: sqrt(diag(M))
  Eigen::MatrixXd chol_m_;     // dense form, lower factor of M (may be empty)
  Eigen::MatrixXd chol_minv_;  // dense form, lower factor of M^{-1} (may be empty)
};

// free-function spellings used throughout the sampler
inline double kinetic_energy(const Metric& m, const Eigen::VectorXd& p) {
  return m.kinetic_energy(p);
}
inline Eigen::VectorXd velocity(const Metric& m, const Eigen::VectorXd& p) {
  return m.velocity(p);
}
inline Eigen::VectorXd sample_momentum(const Metric& m, Rng& rng) {
  return m.sample_momentum(rng);
}

}  // namespace hmc

#endif
