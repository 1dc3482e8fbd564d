#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glmstab {

enum class ErrorKind {
  RankDeficient,
  NoConvergence,
  Singular,
  StageSingular,
  NewtonDiverged,
  QuadratureUnderResolved,
  NotStrictlyStable,
  DegenerateFit,
  WindowOutOfRange,
  ZeroVector,
  DivideByZero,
  OrthogonalityLost,
  ParameterOutsideGap,
  DimensionMismatch,
  Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above.
/// Config errors are the caller's fault; everything else is numerical.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool is_config() const noexcept { return kind_ == ErrorKind::Config; }

 private:
  ErrorKind kind_;
};

}  // namespace glmstab
