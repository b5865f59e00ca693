#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pops {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// N weighted rows of (feature vector, scalar target).
///
/// Weights are normalized to sum to one on construction. Rows whose features
/// are all zero while the target is not are rejected: no parameter vector can
/// reproduce them, so their pointwise optimal parameter set is empty.
class Dataset {
 public:
  Dataset(MatrixXd features, VectorXd targets, VectorXd weights,
          std::vector<std::string> feature_names = {});

  /// Uniform weights 1/N.
  static Dataset uniform(MatrixXd features, VectorXd targets,
                         std::vector<std::string> feature_names = {});

  const MatrixXd& features() const noexcept { return features_; }
  const VectorXd& targets() const noexcept { return targets_; }
  const VectorXd& weights() const noexcept { return weights_; }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }

  Index rows() const noexcept { return features_.rows(); }
  Index cols() const noexcept { return features_.cols(); }

  /// Rows in the given order, weights renormalized.
  Dataset subset(const std::vector<Index>& rows) const;

 private:
  MatrixXd features_;
  VectorXd targets_;
  VectorXd weights_;
  std::vector<std::string> names_;
};

/// Reads a comma-separated file with a header row. Every column other than
/// the target and weight columns is a feature, in header order.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 const std::optional<std::string>& weight_column = std::nullopt);

/// The named columns, in the given order, of every data row. No target needed.
MatrixXd load_feature_columns(const std::filesystem::path& path, const std::vector<std::string>& columns);

/// Writes features then target (and weights when requested), 17 significant digits.
void write_csv(const Dataset& data, const std::filesystem::path& path,
               const std::string& target_column = "y", bool with_weights = false);

/// Disjoint uniform-random partition into (train, test); each part renormalized.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed);

}  // namespace pops
