#include "pops/ensemble.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pops/error.hpp"

namespace pops {

MassMatrix mass_matrix(const CorrectionSet& cs, const Dataset& data, double sigma_scale) {
  if (!(sigma_scale > 0.0) || !std::isfinite(sigma_scale))
    throw Error(ErrorCode::InvalidSpec, "sigma scale must be finite and positive");
  if (appears_specified(cs.base))
    throw Error(ErrorCode::SpecifiedModel, "zero training loss: ensemble weights are undefined, use the hypercube");
  if (cs.rows() != data.rows()) throw Error(ErrorCode::DimensionMismatch, "corrections and data disagree on N");

  MassMatrix mass;
  mass.sigma_scale = sigma_scale;
  mass.variance = sigma_scale * cs.base.loss_residual_var;

  // residual of member i at point j: e_j - t_i.f_j
  MatrixXd r;
  r.noalias() = -cs.corrections * data.features().transpose();
  r.rowwise() += cs.residuals.transpose();
  // Exact interpolation on the diagonal.
  r.diagonal().setZero();

  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * mass.variance);
  mass.log_density = (-0.5 / mass.variance) * r.array().square() + log_norm;
  return mass;
}

EnsembleWeights optimal_weights(const MassMatrix& mass, const Dataset& data) {
  const Index n = mass.size();
  if (data.rows() != n) throw Error(ErrorCode::DimensionMismatch, "mass matrix and data disagree on N");
  const VectorXd& w = data.weights();
  const VectorXd log_w = w.array().log();

  VectorXd raw = VectorXd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    const auto column = mass.log_density.col(j).array() + log_w.array();
    const double top = column.maxCoeff();
    if (!std::isfinite(top))
      throw Error(ErrorCode::DegenerateColumn,
                  "mass column " + std::to_string(j) + " vanishes; raise sigma_scale", std::nullopt,
                  static_cast<std::size_t>(j));
    const double log_sum = top + std::log((column - top).exp().sum());
    // w_j * M[i][j] / sum_k w_k M[k][j]
    raw.array() += w(j) * (mass.log_density.col(j).array() - log_sum).exp();
  }

  EnsembleWeights out;
  out.training_weights = w;
  out.mass_scale = mass.sigma_scale;
  out.normalization = 1.0 / w.dot(raw);
  out.values = out.normalization * raw;
  if (!(out.values.minCoeff() > 0.0))
    throw Error(ErrorCode::DegenerateColumn, "ensemble weight underflowed to zero; raise sigma_scale");
  return out;
}

EnsembleWeights uniform_weights(const Dataset& data) {
  EnsembleWeights out;
  out.values = VectorXd::Ones(data.rows());
  out.training_weights = data.weights();
  return out;
}

PredictionBundle ensemble_predict(const CorrectionSet& cs, const EnsembleWeights& w,
                                  const Eigen::Ref<const VectorXd>& f) {
  if (w.values.size() != cs.rows() || w.training_weights.size() != cs.rows())
    throw Error(ErrorCode::DimensionMismatch, "ensemble weights and corrections disagree on N");
  const auto epistemic = epistemic_predict(cs.base, f);
  const VectorXd shifts = cs.corrections * f;
  const VectorXd mix = w.training_weights.cwiseProduct(w.values);
  const double total = mix.sum();

  PredictionBundle out;
  const double mean_shift = mix.dot(shifts) / total;
  out.mean = epistemic.mean + mean_shift;
  out.std_misspec = std::sqrt(std::max(0.0, mix.dot((shifts.array() - mean_shift).square().matrix()) / total));
  out.std_epistemic = epistemic.std;
  out.max = epistemic.mean + shifts.maxCoeff();
  out.min = epistemic.mean + shifts.minCoeff();
  return out;
}

}  // namespace pops
