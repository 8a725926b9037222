#pragma once

#include <stdexcept>
#include <string>

namespace pgap {

enum class ErrorCode {
  TooFewVertices,
  NonConvex,
  Degenerate,
  InvalidExponent,
  OutsideDomain,
  NonPositiveValue,
  WrongConcavityClass,
  SolverDidNotConverge,
  BracketFailure,
  NonIntegrable,
  IntervalTooShort,
  MeshBudgetExceeded,
  LinearSolveFailure,
  NotConverged,
  ConstraintRootFailure,
  UsageError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::WrongConcavityClass: return "WrongConcavityClass";
    case ErrorCode::SolverDidNotConverge: return "SolverDidNotConverge";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::IntervalTooShort: return "IntervalTooShort";
    case ErrorCode::MeshBudgetExceeded: return "MeshBudgetExceeded";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ConstraintRootFailure: return "ConstraintRootFailure";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

} // namespace pgap
