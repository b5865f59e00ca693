#include "pops/hypercube.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pops/error.hpp"

namespace pops {

Hypercube build_hypercube(const CorrectionSet& cs, double rank_rel_tol) {
  if (!(rank_rel_tol >= 0.0)) throw Error(ErrorCode::InvalidSpec, "rank tolerance must be nonnegative");
  const MatrixXd& t = cs.corrections;
  const Index p = t.cols();

  Hypercube hc;
  hc.base = cs.base;
  hc.rank_rel_tol = rank_rel_tol;

  // Right singular vectors from the P x P Gram matrix; singular values are
  // then re-measured as |T v| so that directions in the numerical null space
  // of T are not inflated by squaring.
  MatrixXd gram = MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(t.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram.selfadjointView<Eigen::Lower>());
  if (eig.info() != Eigen::Success) throw std::logic_error("eigendecomposition of correction Gram matrix failed");

  const MatrixXd v = eig.eigenvectors().rowwise().reverse();  // decreasing eigenvalue
  MatrixXd projected;
  projected.noalias() = t * v;
  const VectorXd sigma = projected.colwise().norm();
  const double sigma_max = sigma.size() > 0 ? sigma.maxCoeff() : 0.0;

  std::vector<Index> keep;
  if (sigma_max > 0.0) {
    for (Index r = 0; r < p; ++r)
      if (sigma(r) >= rank_rel_tol * sigma_max) keep.push_back(r);
  }
  const auto max_rank = std::min(t.rows(), p);
  if (static_cast<Index>(keep.size()) > max_rank) {
    std::stable_sort(keep.begin(), keep.end(), [&](Index a, Index b) { return sigma(a) > sigma(b); });
    keep.resize(static_cast<std::size_t>(max_rank));
    std::sort(keep.begin(), keep.end());
  }

  const auto rank = static_cast<Index>(keep.size());
  hc.basis.resize(rank, p);
  hc.lower.resize(rank);
  hc.upper.resize(rank);
  for (Index k = 0; k < rank; ++k) {
    const Index r = keep[static_cast<std::size_t>(k)];
    VectorXd dir = v.col(r);
    Index pivot = 0;
    dir.cwiseAbs().maxCoeff(&pivot);
    const double sign = dir(pivot) < 0.0 ? -1.0 : 1.0;
    hc.basis.row(k) = sign * dir.transpose();
    const auto coords = sign * projected.col(r).array();
    hc.lower(k) = coords.minCoeff();
    hc.upper(k) = coords.maxCoeff();
  }
  return hc;
}

MatrixXd sample_box(const Hypercube& hc, Index m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MatrixXd x(m, hc.rank());
  for (Index s = 0; s < m; ++s)
    for (Index r = 0; r < hc.rank(); ++r) x(s, r) = hc.lower(r) + unit(rng) * (hc.upper(r) - hc.lower(r));
  return x;
}

MatrixXd sample_hypercube(const Hypercube& hc, Index m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidSpec, "need at least one sample");
  std::mt19937_64 rng(seed);
  const MatrixXd x = sample_box(hc, m, rng);
  MatrixXd samples = x * hc.basis;
  samples.rowwise() += hc.base.theta_star.transpose();
  return samples;
}

PredictionBundle predict_envelope(const Hypercube& hc, const Eigen::Ref<const VectorXd>& f) {
  const auto epistemic = epistemic_predict(hc.base, f);
  const VectorXd g = hc.basis * f;
  const VectorXd center = 0.5 * (hc.lower + hc.upper);
  const VectorXd half = 0.5 * (hc.upper - hc.lower);

  PredictionBundle out;
  out.mean = epistemic.mean + g.dot(center);
  const double half_width = g.cwiseAbs().dot(half);
  out.max = out.mean + half_width;
  out.min = out.mean - half_width;
  out.std_misspec = std::sqrt(g.cwiseProduct(half).squaredNorm() / 3.0);
  out.std_epistemic = epistemic.std;
  return out;
}

std::vector<PredictionBundle> predict_envelopes(const Hypercube& hc, const MatrixXd& features) {
  std::vector<PredictionBundle> out;
  out.reserve(static_cast<std::size_t>(features.rows()));
  for (Index i = 0; i < features.rows(); ++i) out.push_back(predict_envelope(hc, features.row(i).transpose()));
  return out;
}

}  // namespace pops
