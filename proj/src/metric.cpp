#include "hmc/metric.hpp"

#include <cmath>
#include <stdexcept>

namespace hmc {

namespace {

Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  if (!m.isApprox(m.transpose(), 1e-12))
    throw std::invalid_argument(std::string(what) + ": matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(std::string(what) + ": matrix is not positive definite");
  return llt.matrixL();
}

void check_positive(const Eigen::VectorXd& d, const char* what) {
  if (d.size() < 1) throw std::invalid_argument(std::string(what) + ": empty diagonal");
  for (int i = 0; i < d.size(); ++i)
    if (!(d[i] > 0) || !std::isfinite(d[i]))
      throw std::invalid_argument(std::string(what) + ": diagonal entries must be positive");
}

}  // namespace

Metric Metric::unit(int dim) {
  if (dim < 1) throw std::invalid_argument("metric: dim must be >= 1");
  Metric m;
  m.form_ = MetricForm::Unit;
  m.dim_ = dim;
  return m;
}

Metric Metric::diagonal(const Eigen::VectorXd& d) {
  check_positive(d, "diagonal metric");
  Metric m;
  m.form_ = MetricForm::Diagonal;
  m.dim_ = static_cast<int>(d.size());
  m.inv_diag_ = d.cwiseInverse();
  m.sqrt_diag_ = d.cwiseSqrt();
  return m;
}

Metric Metric::from_inverse_diagonal(const Eigen::VectorXd& dinv) {
  check_positive(dinv, "diagonal metric");
  Metric m;
  m.form_ = MetricForm::Diagonal;
  m.dim_ = static_cast<int>(dinv.size());
  m.inv_diag_ = dinv;
  m.sqrt_diag_ = dinv.cwiseInverse().cwiseSqrt();
  return m;
}

Metric Metric::dense(const Eigen::MatrixXd& mat) {
  Metric m;
  m.chol_m_ = lower_cholesky(mat, "dense metric");
  m.form_ = MetricForm::Dense;
  m.dim_ = static_cast<int>(mat.rows());
  return m;
}

Metric Metric::from_inverse_dense(const Eigen::MatrixXd& minv) {
  Metric m;
  m.chol_minv_ = lower_cholesky(minv, "dense metric");
  m.form_ = MetricForm::Dense;
  m.dim_ = static_cast<int>(minv.rows());
  return m;
}

void Metric::check_dim(const Eigen::VectorXd& p) const {
  if (p.size() != dim_)
    throw std::invalid_argument("metric: dimension mismatch");
}

double Metric::kinetic_energy(const Eigen::VectorXd& p) const {
  check_dim(p);
  switch (form_) {
    case MetricForm::Unit:
      return 0.5 * p.squaredNorm();
    case MetricForm::Diagonal:
      return 0.5 * p.dot(inv_diag_.cwiseProduct(p));
    case MetricForm::Dense:
      if (chol_m_.size() > 0) {
        // K = |L^{-1} p|^2 / 2 with M = L L'
        Eigen::VectorXd y =
            chol_m_.triangularView<Eigen::Lower>().solve(p);
        return 0.5 * y.squaredNorm();
      }
      // K = |A' p|^2 / 2 with M^{-1} = A A'
      return 0.5 * (chol_minv_.transpose() * p).squaredNorm();
  }
  return 0;  // unreachable
}

Eigen::VectorXd Metric::velocity(const Eigen::VectorXd& p) const {
  check_dim(p);
  switch (form_) {
    case MetricForm::Unit:
      return p;
    case MetricForm::Diagonal:
      return inv_diag_.cwiseProduct(p);
    case MetricForm::Dense:
      if (chol_m_.size() > 0) {
        Eigen::VectorXd y = chol_m_.triangularView<Eigen::Lower>().solve(p);
        return chol_m_.transpose().triangularView<Eigen::Upper>().solve(y);
      }
      return chol_minv_ * (chol_minv_.transpose() * p);
  }
  return p;  // unreachable
}

Eigen::VectorXd Metric::sample_momentum(Rng& rng) const {
  Eigen::VectorXd z(dim_);
  for (int i = 0; i < dim_; ++i) z[i] = rng.normal();
  switch (form_) {
    case MetricForm::Unit:
      return z;
    case MetricForm::Diagonal:
      return sqrt_diag_.cwiseProduct(z);
    case MetricForm::Dense:
      if (chol_m_.size() > 0) return chol_m_ * z;
      // cov(A'^{-1} z) = (A A')^{-1} = M
      return chol_minv_.transpose().triangularView<Eigen::Upper>().solve(z);
  }
  return z;  // unreachable
}

Eigen::VectorXd Metric::inverse_diagonal() const {
  switch (form_) {
    case MetricForm::Unit:
      return Eigen::VectorXd::Ones(dim_);
    case MetricForm::Diagonal:
      return inv_diag_;
    case MetricForm::Dense:
      return inverse_dense().diagonal();
  }
  return Eigen::VectorXd();  // unreachable
}

Eigen::MatrixXd Metric::inverse_dense() const {
  switch (form_) {
    case MetricForm::Unit:
      return Eigen::MatrixXd::Identity(dim_, dim_);
    case MetricForm::Diagonal:
      return inv_diag_.asDiagonal();
    case MetricForm::Dense:
      if (chol_minv_.size() > 0) return chol_minv_ * chol_minv_.transpose();
      {
        Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim_, dim_);
        Eigen::MatrixXd linv = chol_m_.triangularView<Eigen::Lower>().solve(id);
        return linv.transpose() * linv;
      }
  }
  return Eigen::MatrixXd();  // unreachable
}

}  // namespace hmc
