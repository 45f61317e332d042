#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

// Base for every error raised by the library. kind() is a stable short tag
// used by the CLI when mapping failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define FLOQUET_ERROR(Name)                                              \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(#Name, what) {}       \
  }

FLOQUET_ERROR(DegenerateBasis);
FLOQUET_ERROR(OrthogonalDirection);
FLOQUET_ERROR(ConditionTwoViolated);
FLOQUET_ERROR(IntegrationFailure);
FLOQUET_ERROR(RootBracketFailure);
FLOQUET_ERROR(InterlacingViolation);
FLOQUET_ERROR(OutOfRange);
FLOQUET_ERROR(OutOfGap);
FLOQUET_ERROR(CollisionError);
FLOQUET_ERROR(DegenerateGap);
FLOQUET_ERROR(GapMismatch);
FLOQUET_ERROR(AliasingDetected);
FLOQUET_ERROR(QuadratureNotConverged);
FLOQUET_ERROR(MethodsDisagree);
FLOQUET_ERROR(NoFeasibleEpsilon);
FLOQUET_ERROR(QuadratureNoiseDominates);
FLOQUET_ERROR(PatternViolation);
FLOQUET_ERROR(ConfigError);

#undef FLOQUET_ERROR

}  // namespace floquet
