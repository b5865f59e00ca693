#pragma once

namespace pops {

/// Per-point prediction with misspecification and epistemic uncertainty.
/// Invariants: min <= mean <= max, std_misspec <= (max - min) / 2.
struct PredictionBundle {
  double mean = 0.0;
  double std_misspec = 0.0;
  double std_epistemic = 0.0;
  double max = 0.0;
  double min = 0.0;
};

}  // namespace pops
