#include "hmc/target.hpp"

#include <cmath>
#include <stdexcept>

namespace hmc {

Target Target::std_normal(int dim) {
  if (dim < 1) throw std::invalid_argument("std_normal: dim must be >= 1");
  Target t;
  t.k_ = Kind::StdNormal;
  t.kind_ = "std_normal";
  t.dim_ = dim;
  return t;
}

Target Target::mvn_precision(const Eigen::MatrixXd& precision) {
  if (precision.rows() != precision.cols() || precision.rows() < 1)
    throw std::invalid_argument("mvn_precision: matrix must be square");
  if (!precision.isApprox(precision.transpose(), 1e-12))
    throw std::invalid_argument("mvn_precision: matrix must be symmetric");
  // factor once; this is also the positive-definiteness check
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("mvn_precision: matrix is not positive definite");
  Target t;
  t.k_ = Kind::MvnPrecision;
  t.kind_ = "mvn_precision";
  t.dim_ = static_cast<int>(precision.rows());
  t.precision_ = precision;
  return t;
}

Target Target::funnel(int dim, double scale) {
  if (dim < 2) throw std::invalid_argument("funnel: dim must be >= 2 (needs latents)");
  if (!(scale > 0)) throw std::invalid_argument("funnel: scale must be positive");
  Target t;
  t.k_ = Kind::Funnel;
  t.kind_ = "funnel";
  t.dim_ = dim;
  t.scale_ = scale;
  return t;
}

Target Target::beta_family(double beta) {
  if (!(beta > 0)) throw std::invalid_argument("beta_family: beta must be positive");
  Target t;
  t.k_ = Kind::BetaFamily;
  t.kind_ = "beta_family";
  t.dim_ = 1;
  t.beta_ = beta;
  return t;
}

void Target::check_input(const Eigen::VectorXd& q) const {
  if (q.size() != dim_)
    throw std::invalid_argument("target: dimension mismatch, expected " +
                                std::to_string(dim_) + " got " +
                                std::to_string(q.size()));
  if (!q.allFinite())
    throw std::invalid_argument("target: non-finite input position");
}

double Target::log_density(const Eigen::VectorXd& q) const {
  check_input(q);
  switch (k_) {
    case Kind::StdNormal:
      return -0.5 * q.squaredNorm();
    case Kind::MvnPrecision:
      return -0.5 * q.dot(precision_ * q);
    case Kind::Funnel: {
      double q0 = q[0];
      double latents = q.tail(dim_ - 1).squaredNorm();
      return -q0 * q0 / (2 * scale_ * scale_) - 0.5 * (dim_ - 1) * q0 -
             0.5 * std::exp(-q0) * latents;
    }
    case Kind::BetaFamily:
      return -std::pow(std::abs(q[0]), beta_);
  }
  return 0;  // unreachable
}

Eigen::VectorXd Target::grad_log_density(const Eigen::VectorXd& q) const {
  check_input(q);
  switch (k_) {
    case Kind::StdNormal:
      return -q;
    case Kind::MvnPrecision:
      return -(precision_ * q);
    case Kind::Funnel: {
      double q0 = q[0];
      double e = std::exp(-q0);
      Eigen::VectorXd g(dim_);
      g[0] = -q0 / (scale_ * scale_) - 0.5 * (dim_ - 1) +
             0.5 * e * q.tail(dim_ - 1).squaredNorm();
      g.tail(dim_ - 1) = -e * q.tail(dim_ - 1);
      return g;
    }
    case Kind::BetaFamily: {
      double x = q[0];
      if (x == 0.0) {
        if (beta_ < 2)
          throw std::domain_error("beta_family: gradient undefined at 0 for beta < 2");
        Eigen::VectorXd g(1);
        g[0] = 0.0;
        return g;
      }
      Eigen::VectorXd g(1);
      g[0] = -beta_ * std::pow(std::abs(x), beta_ - 1) * (x > 0 ? 1.0 : -1.0);
      return g;
    }
  }
  return Eigen::VectorXd();  // unreachable
}

Target make_target(const TargetConfig& c) {
  if (c.kind == "std_normal") return Target::std_normal(c.dim);
  if (c.kind == "mvn_precision") return Target::mvn_precision(c.precision);
  if (c.kind == "funnel") return Target::funnel(c.dim, c.scale);
  if (c.kind == "beta_family") return Target::beta_family(c.beta);
  throw std::invalid_argument("make_target: unknown target kind '" + c.kind + "'");
}

}  // namespace hmc
