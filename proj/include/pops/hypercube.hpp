#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pops/pops_core.hpp"
#include "pops/prediction.hpp"

namespace pops {

inline constexpr double kDefaultRankTol = 1e-10;

/// Axis-aligned box bounding every pointwise correction, in the basis of
/// right singular vectors of the corrections matrix. The parameter posterior
/// is uniform over theta* + {x . basis : lower <= x <= upper}.
struct Hypercube {
  /// R x P, orthonormal rows ordered by decreasing singular value.
  MatrixXd basis;
  VectorXd lower;
  VectorXd upper;
  double rank_rel_tol = kDefaultRankTol;
  RidgeFit base;

  Index rank() const noexcept { return basis.rows(); }
};

/// Singular directions below rank_rel_tol * (largest singular value) are
/// dropped; bounds are the exact min/max of the projected corrections. Each
/// basis row is oriented so its largest-magnitude entry is positive.
Hypercube build_hypercube(const CorrectionSet& cs, double rank_rel_tol = kDefaultRankTol);

/// m x P full parameter samples, uniform over the box.
MatrixXd sample_hypercube(const Hypercube& hc, Index m, std::uint64_t seed);

/// Uniform-box coordinates only (m x R), the draws behind sample_hypercube.
MatrixXd sample_box(const Hypercube& hc, Index m, std::mt19937_64& rng);

/// Closed-form envelope of theta.f over the box. With g = basis f,
/// c = (l + u) / 2 and d = (u - l) / 2:
///   mean = theta*.f + g.c,  max/min = mean +- |g|.d,  std = sqrt(sum g^2 d^2 / 3).
PredictionBundle predict_envelope(const Hypercube& hc, const Eigen::Ref<const VectorXd>& f);

std::vector<PredictionBundle> predict_envelopes(const Hypercube& hc, const MatrixXd& features);

}  // namespace pops
