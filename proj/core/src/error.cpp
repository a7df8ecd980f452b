#include "tempsep/error.hpp"

namespace tempsep {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInvalidSpectrum: return "InvalidSpectrum";
    case ErrorKind::kUnsupportedParams: return "UnsupportedParams";
    case ErrorKind::kDivergentMoment: return "DivergentMoment";
    case ErrorKind::kNonConvergedQuadrature: return "NonConvergedQuadrature";
    case ErrorKind::kNormalizationViolated: return "NormalizationViolated";
    case ErrorKind::kDegenerateIndex: return "DegenerateIndex";
    case ErrorKind::kNonlinearSolveImpossible: return "NonlinearSolveImpossible";
    case ErrorKind::kZeroPivot: return "ZeroPivot";
    case ErrorKind::kPoleHit: return "PoleHit";
    case ErrorKind::kNonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorKind::kPositivityViolation: return "PositivityViolation";
    case ErrorKind::kStepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::kSnapshotMissing: return "SnapshotMissing";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kInvalidSpectrum:
    case ErrorKind::kUnsupportedParams:
    case ErrorKind::kNormalizationViolated:
    case ErrorKind::kIo:
      return true;
    default:
      return false;
  }
}

}  // namespace tempsep
