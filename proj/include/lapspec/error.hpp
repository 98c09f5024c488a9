#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lapspec {

enum class ErrorKind {
  // graph construction
  DuplicateEdge,
  SelfLoop,
  IndexOutOfRange,
  TooSmall,
  BadParameters,
  IsolatedNode,
  // shapes and preconditions
  DimensionMismatch,
  InvalidInput,
  InsufficientData,
  // estimator
  EmptySupport,
  RankDeficientSystem,
  ComplexRoots,
  NonpositiveRoot,
  UnmixingSingular,
  NuVanishes,
  NumericalFailure,
  // front end
  InvalidConfig,
  Io,
};

inline std::string_view error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::BadParameters: return "BadParameters";
    case ErrorKind::IsolatedNode: return "IsolatedNode";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::RankDeficientSystem: return "RankDeficientSystem";
    case ErrorKind::ComplexRoots: return "ComplexRoots";
    case ErrorKind::NonpositiveRoot: return "NonpositiveRoot";
    case ErrorKind::UnmixingSingular: return "UnmixingSingular";
    case ErrorKind::NuVanishes: return "NuVanishes";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit code for an error: 2 validation, 3 numerical failure, 4 IO.
inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ComplexRoots:
    case ErrorKind::NonpositiveRoot:
    case ErrorKind::RankDeficientSystem:
    case ErrorKind::NumericalFailure:
    case ErrorKind::NuVanishes:
      return 3;
    case ErrorKind::Io:
      return 4;
    default:
      return 2;
  }
}

}  // namespace lapspec
