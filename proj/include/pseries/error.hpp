#pragma once

#include <stdexcept>
#include <string>

namespace pseries {

enum class ErrorKind {
  PrecisionExhausted,
  IncompatibleContext,
  DimensionMismatch,
  NotContained,
  NotInvariant,
  NotProP,
  NoStableFit,
  RateOutOfRange,
  FrameRejected,
  NotABoundary,
  RankDeficient,
  EnumerationTooLarge,
  InvalidShape,
  InvalidInput,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::IncompatibleContext: return "IncompatibleContext";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotContained: return "NotContained";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::NotProP: return "NotProP";
    case ErrorKind::NoStableFit: return "NoStableFit";
    case ErrorKind::RateOutOfRange: return "RateOutOfRange";
    case ErrorKind::FrameRejected: return "FrameRejected";
    case ErrorKind::NotABoundary: return "NotABoundary";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorKind::InvalidShape: return "InvalidShape";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Base of every error thrown by the library. `kind()` lets callers (the CLI
/// in particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}
  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

#define PSERIES_DEFINE_ERROR(Name)                                         \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Name, what) {} \
  };

PSERIES_DEFINE_ERROR(PrecisionExhausted)
PSERIES_DEFINE_ERROR(IncompatibleContext)
PSERIES_DEFINE_ERROR(DimensionMismatch)
PSERIES_DEFINE_ERROR(NotContained)
PSERIES_DEFINE_ERROR(NotInvariant)
PSERIES_DEFINE_ERROR(NotProP)
PSERIES_DEFINE_ERROR(NoStableFit)
PSERIES_DEFINE_ERROR(RateOutOfRange)
PSERIES_DEFINE_ERROR(FrameRejected)
PSERIES_DEFINE_ERROR(NotABoundary)
PSERIES_DEFINE_ERROR(RankDeficient)
PSERIES_DEFINE_ERROR(EnumerationTooLarge)
PSERIES_DEFINE_ERROR(InvalidShape)
PSERIES_DEFINE_ERROR(InvalidInput)

#undef PSERIES_DEFINE_ERROR

/// Rethrows a message under the concrete error type for `kind`.
[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& what) {
  switch (kind) {
    case ErrorKind::PrecisionExhausted: throw PrecisionExhausted(what);
    case ErrorKind::IncompatibleContext: throw IncompatibleContext(what);
    case ErrorKind::DimensionMismatch: throw DimensionMismatch(what);
    case ErrorKind::NotContained: throw NotContained(what);
    case ErrorKind::NotInvariant: throw NotInvariant(what);
    case ErrorKind::NotProP: throw NotProP(what);
    case ErrorKind::NoStableFit: throw NoStableFit(what);
    case ErrorKind::RateOutOfRange: throw RateOutOfRange(what);
    case ErrorKind::FrameRejected: throw FrameRejected(what);
    case ErrorKind::NotABoundary: throw NotABoundary(what);
    case ErrorKind::RankDeficient: throw RankDeficient(what);
    case ErrorKind::EnumerationTooLarge: throw EnumerationTooLarge(what);
    case ErrorKind::InvalidShape: throw InvalidShape(what);
    case ErrorKind::InvalidInput: throw InvalidInput(what);
  }
  throw Error(kind, what);
}

}  // namespace pseries
