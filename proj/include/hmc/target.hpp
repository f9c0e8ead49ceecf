#ifndef HMC_TARGET_HPP
#define HMC_TARGET_HPP

#include <Eigen/Dense>
#include <string>

namespace hmc {

/**
 * Unnormalized target density: log pi(q) and its gradient over R^D.
 *
 * Built-in analytic families only. Normalization constants are dropped
 * throughout; the sampler only ever uses differences and ratios.
 */
class Target {
 public:
  static Target std_normal(int dim);
  static Target mvn_precision(const Eigen::MatrixXd& precision);
  static Target funnel(int dim, double scale = 3.0);
  static Target beta_family(double beta);

  int dim() const { return dim_; }
  const std::string& kind() const { return kind_; }

  double log_density(const Eigen::VectorXd& q) const;
  Eigen::VectorXd grad_log_density(const Eigen::VectorXd& q) const;

  // parameters, for config echo
  double beta() const { return beta_; }
  double scale() const { return scale_; }
  const Eigen::MatrixXd& precision() const { return precision_; }

 private:
  Target() = default;
  void check_input(const Eigen::VectorXd& q) const;

  enum class Kind { StdNormal, MvnPrecision, Funnel, BetaFamily };
  Kind k_ = Kind::StdNormal;
  std::string kind_;
  int dim_ = 1;
  double beta_ = 2.0;
  double scale_ = 3.0;
  Eigen::MatrixXd precision_;
};

// Descriptor consumed by make_target; mirrors the CLI's JSON form.
struct TargetConfig {
  std::string kind;
  int dim = 1;
  double beta = 1.0;
  double scale = 3.0;
  Eigen::MatrixXd precision;
};

Target make_target(const TargetConfig& c);

}  // namespace hmc

#endif
