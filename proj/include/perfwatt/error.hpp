#pragma once

#include <stdexcept>
#include <string>

namespace perfwatt {

enum class ErrorCode {
  InvalidArgument,
  InvalidDescriptor,
  UnsupportedOnHost,
  ReplayFileUnreadable,
  BackendClosed,
  TransientReadFailure,
  AlreadySampling,
  InvalidPlan,
  TooFewPoints,
  ZeroEvents,
  ThreadSpawnFailure,
  TargetUnreachable,
  KindMismatch,
  UnalignableSeries,
  NonMonotoneCounter,
  EmptyWindowOverlap,
  ZeroPower,
  PointFailed,
  InvalidConfig,
  IoFailure,
  EmptySweep,
  FewerThanTwoSweeps,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a stable machine-checkable code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace perfwatt
