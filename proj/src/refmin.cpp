#include "pops/refmin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pops/error.hpp"
#include "pops/pops_core.hpp"

namespace pops {

namespace {

constexpr double kGradTol = 1e-6;
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

bool finite(const MatrixXd& m) { return m.allFinite(); }

double max_spread(const MatrixXd& members, const VectorXd& center) {
  return (members.rowwise() - center.transpose()).rowwise().norm().maxCoeff();
}

}  // namespace

const char* to_string(GeStatus status) noexcept {
  switch (status) {
    case GeStatus::Converged: return "converged";
    case GeStatus::IterationCap: return "iteration-cap";
    case GeStatus::Stalled: return "stalled";
  }
  return "unknown";
}

double ge_objective(const Dataset& data, const MatrixXd& members, double variance, MatrixXd* gradient) {
  const Index k = members.rows();
  const Index n = data.rows();
  const VectorXd& w = data.weights();

  // r(k, j) = y_j - theta_k.f_j
  MatrixXd r;
  r.noalias() = -members * data.features().transpose();
  r.rowwise() += data.targets().transpose();

  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * variance) - std::log(static_cast<double>(k));
  MatrixXd log_density = (-0.5 / variance) * r.array().square();

  double objective = 0.0;
  MatrixXd resp(k, n);
  for (Index j = 0; j < n; ++j) {
    const double top = log_density.col(j).maxCoeff();
    const auto shifted = (log_density.col(j).array() - top).exp();
    const double sum = shifted.sum();
    objective -= w(j) * (top + std::log(sum) + log_norm);
    resp.col(j) = shifted / sum;
  }
  if (gradient) {
    // dG/dtheta_k = -sum_j w_j resp_kj r_kj / variance f_j
    const MatrixXd weighted = (resp.array() * r.array()).rowwise() * w.transpose().array();
    gradient->noalias() = (-1.0 / variance) * weighted * data.features();
  }
  return objective;
}

MatrixXd initial_members(const Dataset& data, const RidgeFit& fit, const GeConfig& cfg) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (cfg.init == GeInit::PopsEnsemble) {
    if (cfg.members != 0 && cfg.members != n)
      throw Error(ErrorCode::PreconditionFailed, "POPS initialization uses one member per training row");
    const CorrectionSet cs = pointwise_fits(fit, data);
    MatrixXd members = cs.corrections;
    members.rowwise() += fit.theta_star.transpose();
    return members;
  }

  // Jitter with the epistemic covariance of the regularized problem,
  // (sigma_scale * loss_residual_var / N) A, diagonal only.
  const Index k = cfg.members == 0 ? n : cfg.members;
  const double variance = cfg.sigma_scale * fit.loss_residual_var;
  const VectorXd scale =
      (variance / static_cast<double>(fit.n_train) * fit.a_matrix.diagonal().array()).sqrt().matrix();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd members(k, p);
  for (Index i = 0; i < k; ++i)
    for (Index c = 0; c < p; ++c) members(i, c) = fit.theta_star(c) + scale(c) * normal(rng);
  return members;
}

GeResult minimize_ge(const Dataset& data, const RidgeFit& fit, const GeConfig& cfg) {
  if (data.cols() > kRefminMaxFeatures || data.rows() > kRefminMaxRows)
    throw Error(ErrorCode::PreconditionFailed, "direct G_E minimization is limited to P <= 8 and N <= 1000");
  if (cfg.members < 0) throw Error(ErrorCode::InvalidSpec, "member count must be positive");
  if (!(cfg.step_size > 0.0)) throw Error(ErrorCode::InvalidSpec, "step size must be positive");
  if (!(cfg.sigma_scale > 0.0)) throw Error(ErrorCode::InvalidSpec, "sigma scale must be positive");
  if (appears_specified(fit))
    throw Error(ErrorCode::SpecifiedModel, "zero training loss: G_E regularization sigma * loss is zero");

  const double variance = cfg.sigma_scale * fit.loss_residual_var;
  GeResult result;
  result.members = initial_members(data, fit, cfg);

  MatrixXd grad(result.members.rows(), result.members.cols());
  double value = ge_objective(data, result.members, variance, &grad);
  auto check = [&](double v, const MatrixXd& g) {
    if (!std::isfinite(v) || !finite(g))
      throw Error(ErrorCode::ScaleTooSmall,
                  "G_E or its gradient is not finite at sigma_scale " + std::to_string(cfg.sigma_scale));
  };
  check(value, grad);
  result.initial_value = value;

  double step = cfg.step_size;
  MatrixXd trial_grad(grad.rows(), grad.cols());
  Index iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    const double grad_sq = grad.squaredNorm();
    result.log.push_back({iter, value, std::sqrt(grad_sq), step, max_spread(result.members, fit.theta_star)});
    if (std::sqrt(grad_sq) < kGradTol) {
      result.status = GeStatus::Converged;
      break;
    }

    step = std::min(2.0 * step, cfg.step_size);
    bool accepted = false;
    for (int halving = 0; halving < kMaxHalvings; ++halving, step *= 0.5) {
      const MatrixXd trial = result.members - step * grad;
      const double trial_value = ge_objective(data, trial, variance, &trial_grad);
      if (std::isfinite(trial_value) && trial_value <= value - kArmijo * step * grad_sq) {
        check(trial_value, trial_grad);
        result.members = trial;
        value = trial_value;
        grad.swap(trial_grad);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.status = GeStatus::Stalled;
      break;
    }
  }
  if (iter == cfg.max_iters) result.status = GeStatus::IterationCap;
  result.iterations = iter;
  result.ge_value = value;
  result.converged = result.status == GeStatus::Converged;
  return result;
}

}  // namespace pops
