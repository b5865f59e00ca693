#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "pops/dataset.hpp"
#include "pops/engines.hpp"

namespace testing {

using namespace pops;

// f = (1,0), (0,1), (1,1); y = (1, 2, 4)
inline Dataset three_row() {
  MatrixXd f(3, 2);
  f << 1, 0, 0, 1, 1, 1;
  VectorXd y(3);
  y << 1, 2, 4;
  return Dataset::uniform(f, y);
}

// Gaussian features and targets with uneven positive weights.
inline Dataset random_instance(std::uint64_t seed, Index n, Index p) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  MatrixXd f(n, p);
  VectorXd y(n), w(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) f(i, j) = normal(rng);
    y(i) = normal(rng);
    w(i) = weight(rng);
  }
  return Dataset(f, y, w);
}

inline Dataset sinusoid(Index n, std::uint64_t seed) {
  EngineSpec spec;
  spec.kind = EngineKind::Sinusoid;
  spec.feature_degree = 2;
  return synth_engine(spec, n, seed);
}

inline Dataset cubic(Index p, Index n, std::uint64_t seed) {
  EngineSpec spec;
  spec.kind = EngineKind::Cubic;
  spec.input_dim = static_cast<int>(p);
  spec.coefficient_seed = seed;
  return synth_engine(spec, n, seed + 1000);
}

// Exactly linear targets: a specified model.
inline Dataset linear_instance(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd f(n, p);
  VectorXd theta(p);
  for (Index j = 0; j < p; ++j) theta(j) = u(rng);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) f(i, j) = u(rng);
  return Dataset::uniform(f, f * theta);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pops_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing
