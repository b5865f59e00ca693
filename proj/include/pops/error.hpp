#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace pops {

enum class ErrorCode {
  MissingColumn,
  NonFiniteValue,
  EmptyPopsRow,
  EmptyFile,
  InvalidSpec,
  DegenerateSplit,
  SingularSystem,
  LeverageUnderflow,
  SpecifiedModel,
  DegenerateColumn,
  ScaleTooSmall,
  DimensionMismatch,
  PreconditionFailed,
  Io,
  Format,
};

const char* to_string(ErrorCode code) noexcept;

/// User- or data-level failure. Internal invariant violations use
/// std::logic_error instead, so callers can tell the two apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::size_t> column = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

}  // namespace pops
