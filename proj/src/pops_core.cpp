#include "pops/pops_core.hpp"

#include <cmath>

#include "pops/error.hpp"

namespace pops {

CorrectionSet pointwise_fits(const RidgeFit& fit, const Dataset& data) {
  if (fit.dim() != data.cols() || fit.n_train != data.rows())
    throw Error(ErrorCode::DimensionMismatch, "fit was not produced from this dataset");

  CorrectionSet cs;
  cs.base = fit;
  cs.residuals = residuals(fit, data);

  // Row i of F A is (A f_i)^T since A is symmetric.
  cs.corrections.noalias() = data.features() * fit.a_matrix;
  cs.leverages = data.features().cwiseProduct(cs.corrections).rowwise().sum();

  for (Index i = 0; i < data.rows(); ++i) {
    const double h = cs.leverages(i);
    if (!(h >= kMinLeverage))
      throw Error(ErrorCode::LeverageUnderflow,
                  "leverage " + std::to_string(h) + " at row " + std::to_string(i) + " is below 1e-12",
                  static_cast<std::size_t>(i));
    cs.corrections.row(i) *= cs.residuals(i) / h;
  }
  return cs;
}

VectorXd constrained_fit_oracle(const Dataset& data, Index i, const RidgeFit& fit) {
  const Index p = data.cols();
  if (i < 0 || i >= data.rows()) throw Error(ErrorCode::DimensionMismatch, "row index out of range");
  if (fit.dim() != p) throw Error(ErrorCode::DimensionMismatch, "fit and data disagree on P");

  const MatrixXd& f = data.features();
  const VectorXd& w = data.weights();
  MatrixXd kkt = MatrixXd::Zero(p + 1, p + 1);
  VectorXd rhs = VectorXd::Zero(p + 1);
  for (Index j = 0; j < data.rows(); ++j) {
    kkt.topLeftCorner(p, p).noalias() += w(j) * f.row(j).transpose() * f.row(j);
    rhs.head(p) += w(j) * data.targets()(j) * f.row(j).transpose();
  }
  kkt.topLeftCorner(p, p).diagonal().array() += fit.ridge_term();
  kkt.block(0, p, p, 1) = f.row(i).transpose();
  kkt.block(p, 0, 1, p) = f.row(i);
  rhs(p) = data.targets()(i);

  Eigen::FullPivLU<MatrixXd> lu(kkt);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "constrained stationarity system is singular");
  return lu.solve(rhs).head(p);
}

double leverage_centroid_check(const CorrectionSet& cs, const Dataset& data) {
  const VectorXd mass = data.weights().cwiseProduct(cs.leverages);
  // sum_i m_i theta*_i = (sum m) theta* + sum_i m_i t_i
  const VectorXd centroid = cs.base.theta_star + cs.corrections.transpose() * mass / mass.sum();
  const double scale = cs.base.theta_star.norm();
  const double gap = (centroid - cs.base.theta_star).norm();
  return scale > 0.0 ? gap / scale : gap;
}

}  // namespace pops
