#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmod {

enum class ErrorKind {
  NotHermitian,
  NoConvergence,
  NotPsd,
  SingularOperand,
  SingularDenominator,
  KernelOverlap,
  ShapeMismatch,
  ArityUnsupported,
  NotInvertible,
  NotIntertwiner,
  OnUnitAxis,
  NotFullSuspected,
  NotPrime,
  NotD2Shape,
  ParseError,
  ShapeError,
  PythagoreanViolation,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::SingularOperand: return "SingularOperand";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::KernelOverlap: return "KernelOverlap";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::ArityUnsupported: return "ArityUnsupported";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::NotIntertwiner: return "NotIntertwiner";
    case ErrorKind::OnUnitAxis: return "OnUnitAxis";
    case ErrorKind::NotFullSuspected: return "NotFullSuspected";
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::NotD2Shape: return "NotD2Shape";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::PythagoreanViolation: return "PythagoreanViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (the CLI in particular) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pmod
