#include "pops/bayes_ridge.hpp"

#include <cmath>
#include <limits>

#include "pops/error.hpp"

namespace pops {

namespace {

// Reciprocal condition number below which the second-moment matrix is
// treated as singular.
double singular_threshold(Index p) {
  return static_cast<double>(p) * std::numeric_limits<double>::epsilon();
}

void check_dims(const RidgeFit& fit, Index p) {
  if (fit.dim() != p)
    throw Error(ErrorCode::DimensionMismatch,
                "feature vector has " + std::to_string(p) + " entries, model has " + std::to_string(fit.dim()));
}

}  // namespace

MatrixXd second_moment(const Dataset& data) {
  const Index p = data.cols();
  MatrixXd scaled = data.weights().cwiseSqrt().asDiagonal() * data.features();
  MatrixXd c = MatrixXd::Zero(p, p);
  c.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return c;
}

double default_prior_precision(const Dataset& data) {
  const MatrixXd& f = data.features();
  double trace = 0.0;
  for (Index i = 0; i < data.rows(); ++i) trace += data.weights()(i) * f.row(i).squaredNorm();
  return 1e-10 * trace / static_cast<double>(data.cols());
}

RidgeFit fit_min_loss(const Dataset& data, double prior_precision_scale, double noise_var) {
  if (!(prior_precision_scale >= 0.0) || !std::isfinite(prior_precision_scale))
    throw Error(ErrorCode::InvalidSpec, "prior precision scale must be finite and nonnegative");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var))
    throw Error(ErrorCode::InvalidSpec, "noise variance must be finite and positive");

  const Index p = data.cols();
  RidgeFit fit;
  fit.noise_var = noise_var;
  fit.prior_precision_scale = prior_precision_scale;
  fit.n_train = data.rows();

  MatrixXd c = second_moment(data);
  c.diagonal().array() += fit.ridge_term();

  Eigen::LLT<MatrixXd> llt(c);
  if (llt.info() != Eigen::Success || !(llt.rcond() > singular_threshold(p)))
    throw Error(ErrorCode::SingularSystem, "regularized feature second moment is singular (rank-deficient features)");

  fit.a_matrix = llt.solve(MatrixXd::Identity(p, p));
  fit.a_matrix = 0.5 * (fit.a_matrix + fit.a_matrix.transpose()).eval();
  const VectorXd moment = data.features().transpose() * data.weights().cwiseProduct(data.targets());
  fit.theta_star = llt.solve(moment);

  const VectorXd e = residuals(fit, data);
  fit.loss_residual_var = data.weights().dot(e.cwiseAbs2());
  return fit;
}

VectorXd residuals(const RidgeFit& fit, const Dataset& data) {
  check_dims(fit, data.cols());
  const MatrixXd& f = data.features();
  VectorXd e = data.targets() - f * fit.theta_star;
  for (Index i = 0; i < data.rows(); ++i) {
    const double scale = std::abs(data.targets()(i)) + f.row(i).cwiseAbs().dot(fit.theta_star.cwiseAbs());
    if (std::abs(e(i)) <= kRoundoffTol * scale) e(i) = 0.0;
  }
  return e;
}

EpistemicPrediction epistemic_predict(const RidgeFit& fit, const Eigen::Ref<const VectorXd>& f) {
  check_dims(fit, f.size());
  const double quad = std::max(0.0, f.dot(fit.a_matrix * f));
  return {fit.theta_star.dot(f), std::sqrt(fit.noise_var / static_cast<double>(fit.n_train) * quad)};
}

double bic_deterministic(const RidgeFit& fit, const Dataset& data) {
  check_dims(fit, data.cols());
  const Index p = data.cols();
  const auto n = static_cast<double>(data.rows());
  Eigen::LLT<MatrixXd> llt(second_moment(data));
  if (llt.info() != Eigen::Success || !(llt.rcond() > singular_threshold(p)))
    throw Error(ErrorCode::SingularSystem, "feature second moment is singular; BIC undefined");
  const double log_det_moment = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double log_det_information = log_det_moment - static_cast<double>(p) * std::log(fit.noise_var);
  return n * fit.loss_residual_var / fit.noise_var + static_cast<double>(p) * std::log(n) + log_det_information;
}

}  // namespace pops
