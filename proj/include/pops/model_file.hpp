#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pops/ensemble.hpp"
#include "pops/io.hpp"
#include "pops/hypercube.hpp"

namespace pops {

inline constexpr int kModelFormatVersion = 1;

struct EnsembleModel {
  CorrectionSet corrections;  // residuals and leverages are not persisted
  EnsembleWeights weights;
};

/// Everything `predict` needs: the ridge fit, its hypercube and optionally
/// the weighted ensemble. Serialized as a versioned JSON document whose
/// numbers round-trip bitwise.
struct ModelFile {
  int format_version = kModelFormatVersion;
  std::vector<std::string> feature_names;
  std::string target_column = "y";
  Hypercube hypercube;  // hypercube.base holds the ridge fit
  std::optional<EnsembleModel> ensemble;

  const RidgeFit& ridge() const noexcept { return hypercube.base; }
};

std::string serialize_model(const ModelFile& model);
ModelFile parse_model(const std::string& text);

/// Atomic: writes a temporary file next to `path`, then renames it.
void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace pops
