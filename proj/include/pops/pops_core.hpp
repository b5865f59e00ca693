#pragma once

#include "pops/bayes_ridge.hpp"

namespace pops {

/// Leverages below this make a pointwise correction numerically unbounded.
inline constexpr double kMinLeverage = 1e-12;

/// Pointwise optimal fits expressed as corrections to the minimum-loss
/// solution: row i is t_i = theta*_i - theta*, where theta*_i minimizes the
/// penalized loss subject to theta.f_i = y_i.
///
/// Stored dense (N x P); for large N this is the dominant allocation.
struct CorrectionSet {
  MatrixXd corrections;
  /// e_i = y_i - theta*.f_i
  VectorXd residuals;
  /// h_i = f_i^T A f_i
  VectorXd leverages;
  RidgeFit base;

  Index rows() const noexcept { return corrections.rows(); }
  /// Full parameter vector theta*_i of member i.
  VectorXd member(Index i) const { return base.theta_star + corrections.row(i).transpose(); }
};

/// Rank-one updates t_i = (e_i / h_i) A f_i, one per training row.
CorrectionSet pointwise_fits(const RidgeFit& fit, const Dataset& data);

/// Independent check of a single pointwise fit: solves the equality
/// constrained quadratic program
///   min 1/2 <(y - theta.f)^2> + 1/2 ridge |theta|^2  s.t.  theta.f_i = y_i
/// through its (P+1) x (P+1) Lagrange system.
VectorXd constrained_fit_oracle(const Dataset& data, Index i, const RidgeFit& fit);

/// |(sum_i w_i h_i theta*_i) / (sum_i w_i h_i) - theta*| / |theta*|.
/// Vanishes for a zero-prior fit.
double leverage_centroid_check(const CorrectionSet& cs, const Dataset& data);

}  // namespace pops
