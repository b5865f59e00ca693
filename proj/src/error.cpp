#include "pops/error.hpp"

namespace pops {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyPopsRow: return "EmptyPopsRow";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::LeverageUnderflow: return "LeverageUnderflow";
    case ErrorCode::SpecifiedModel: return "SpecifiedModel";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::ScaleTooSmall: return "ScaleTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> row, std::optional<std::size_t> column)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      row_(row),
      column_(column) {}

}  // namespace pops
