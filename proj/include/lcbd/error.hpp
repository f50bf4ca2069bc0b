#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcbd {

enum class ErrorKind {
  InvalidArgument,
  ImaginaryResidue,
  OutOfRange,
  NonMonotonicTime,
  SuperluminalSample,
  NoCrossing,
  Coincident,
  PsiZero,
  Lightlike,
  DomainMismatch,
  EnvelopeExceeded,
  Validation,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorKind::SuperluminalSample: return "SuperluminalSample";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::Coincident: return "Coincident";
    case ErrorKind::PsiZero: return "PsiZero";
    case ErrorKind::Lightlike: return "Lightlike";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::EnvelopeExceeded: return "EnvelopeExceeded";
    case ErrorKind::Validation: return "Validation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lcbd
