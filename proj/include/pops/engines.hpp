#pragma once

#include <cstdint>
#include <string>

#include "pops/dataset.hpp"

namespace pops {

enum class EngineKind { Sinusoid, Cubic, Quadratic, RandomLinear };

EngineKind parse_engine_kind(const std::string& name);
const char* to_string(EngineKind kind) noexcept;

/// Synthetic "simulation engine" that a linear surrogate cannot represent.
///
/// Sinusoid: y = sin(pi x) on a scalar input, features are the monomials
/// 1, x, ..., x^feature_degree.
///
/// Cubic, Quadratic, RandomLinear: features are the drawn input vector itself
/// (P = input_dim); the target combines those features nonlinearly:
///   cubic      y = a.x + b.(x_i x_{i+1} x_{i+2}) + c.(x_i^3)
///   quadratic  y = a.x + b.(x_i x_{i+1}) + c.(x_i^2)
///   random     standard-normal coefficients over the pool
///              {x_i, x_i^2, x_i^3, x_i x_{i+1}, x_i x_{i+1} x_{i+2}}
/// with cyclic indices and coefficients drawn from coefficient_seed.
struct EngineSpec {
  EngineKind kind = EngineKind::Cubic;
  int input_dim = 1;
  int feature_degree = 2;
  double noise_std = 0.0;
  std::uint64_t coefficient_seed = 0;

  void validate() const;
  /// Number of features P produced by this engine.
  Index feature_count() const;
};

/// Inputs uniform on [-1, 1]^input_dim, Gaussian target noise of std noise_std.
/// Bitwise deterministic for fixed (spec, n, seed).
Dataset synth_engine(const EngineSpec& spec, Index n, std::uint64_t seed);

}  // namespace pops
