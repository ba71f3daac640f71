// Error codes shared across the library. Every precondition failure maps to
// one code so callers (and tests) can dispatch without string matching.
#pragma once

#include <stdexcept>
#include <string>

namespace graphpot {

enum class ErrorCode {
  InvalidLength,
  Disconnected,
  UnsupportedFamily,
  InvalidPoint,
  SampleTooSmall,
  EmptyDomain,
  StepTooLarge,
  ZeroVector,
  ConvergenceFailure,
  RadiusExceedsTruncation,
  SpectralBarrier,
  SolveFailure,
  LambdaAboveSpectrum,
  NonConverged,
  PoleCollision,
  PoleInsideEnlargedBall,
  BallExitsDomain,
  StartOnBoundary,
  StartMisplaced,
  ExcessTruncation,
  NestingViolation,
  DisconnectedDomain,
  ConfigParse,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace graphpot
