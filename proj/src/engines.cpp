#include "pops/engines.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pops/error.hpp"

namespace pops {

EngineKind parse_engine_kind(const std::string& name) {
  if (name == "sinusoid") return EngineKind::Sinusoid;
  if (name == "cubic") return EngineKind::Cubic;
  if (name == "quadratic") return EngineKind::Quadratic;
  if (name == "random-linear") return EngineKind::RandomLinear;
  throw Error(ErrorCode::InvalidSpec, "unknown engine '" + name + "'");
}

const char* to_string(EngineKind kind) noexcept {
  switch (kind) {
    case EngineKind::Sinusoid: return "sinusoid";
    case EngineKind::Cubic: return "cubic";
    case EngineKind::Quadratic: return "quadratic";
    case EngineKind::RandomLinear: return "random-linear";
  }
  return "unknown";
}

void EngineSpec::validate() const {
  if (input_dim < 1) throw Error(ErrorCode::InvalidSpec, "input_dim must be positive");
  if (feature_degree < 1) throw Error(ErrorCode::InvalidSpec, "feature_degree must be positive");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw Error(ErrorCode::InvalidSpec, "noise_std must be finite and nonnegative");
  if (kind == EngineKind::Sinusoid && input_dim != 1)
    throw Error(ErrorCode::InvalidSpec, "the sinusoid engine takes a scalar input (input_dim = 1)");
}

Index EngineSpec::feature_count() const {
  return kind == EngineKind::Sinusoid ? feature_degree + 1 : input_dim;
}

namespace {

// Coefficient blocks over the pool {x, x^2, x^3, x_i x_{i+1}, x_i x_{i+1} x_{i+2}}.
struct Coefficients {
  VectorXd linear, square, cube, pair, triple;
};

Coefficients draw_coefficients(const EngineSpec& spec) {
  const Index d = spec.input_dim;
  std::mt19937_64 rng(spec.coefficient_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] {
    VectorXd v(d);
    for (Index i = 0; i < d; ++i) v(i) = normal(rng) / std::sqrt(static_cast<double>(d));
    return v;
  };
  Coefficients c;
  c.linear = draw();
  c.square = draw();
  c.cube = draw();
  c.pair = draw();
  c.triple = draw();
  switch (spec.kind) {
    case EngineKind::Cubic:
      c.square.setZero();
      c.pair.setZero();
      break;
    case EngineKind::Quadratic:
      c.cube.setZero();
      c.triple.setZero();
      break;
    default:
      break;
  }
  return c;
}

double evaluate(const Coefficients& c, const Eigen::Ref<const VectorXd>& x) {
  const Index d = x.size();
  double y = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double xi = x(i);
    const double xj = x((i + 1) % d);
    const double xk = x((i + 2) % d);
    y += c.linear(i) * xi + c.square(i) * xi * xi + c.cube(i) * xi * xi * xi + c.pair(i) * xi * xj +
         c.triple(i) * xi * xj * xk;
  }
  return y;
}

}  // namespace

Dataset synth_engine(const EngineSpec& spec, Index n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "need at least one row");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  const Index d = spec.input_dim;
  const Index p = spec.feature_count();
  MatrixXd features(n, p);
  VectorXd targets(n);

  if (spec.kind == EngineKind::Sinusoid) {
    for (Index i = 0; i < n; ++i) {
      const double x = box(rng);
      double power = 1.0;
      for (Index k = 0; k < p; ++k) {
        features(i, k) = power;
        power *= x;
      }
      targets(i) = std::sin(std::numbers::pi * x);
    }
  } else {
    const Coefficients coefficients = draw_coefficients(spec);
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < d; ++k) features(i, k) = box(rng);
      targets(i) = evaluate(coefficients, features.row(i).transpose());
    }
  }
  if (spec.noise_std > 0.0) {
    for (Index i = 0; i < n; ++i) targets(i) += spec.noise_std * noise(rng);
  }
  return Dataset::uniform(std::move(features), std::move(targets));
}

}  // namespace pops
