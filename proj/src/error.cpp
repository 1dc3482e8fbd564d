#include "glmstab/error.hpp"

namespace glmstab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::StageSingular: return "StageSingular";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorKind::NotStrictlyStable: return "NotStrictlyStable";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DivideByZero: return "DivideByZero";
    case ErrorKind::OrthogonalityLost: return "OrthogonalityLost";
    case ErrorKind::ParameterOutsideGap: return "ParameterOutsideGap";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace glmstab
