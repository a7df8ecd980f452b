#pragma once

#include <stdexcept>
#include <string>

namespace tempsep {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidSpectrum,
  kUnsupportedParams,
  kDivergentMoment,
  kNonConvergedQuadrature,
  kNormalizationViolated,
  kDegenerateIndex,
  kNonlinearSolveImpossible,
  kZeroPivot,
  kPoleHit,
  kNonPositiveTemperature,
  kPositivityViolation,
  kStepSizeUnderflow,
  kSnapshotMissing,
  kIo,
};

const char* to_string(ErrorKind kind);

// True for errors caused by bad input rather than by a numerical breakdown.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tempsep
