#pragma once

#include <stdexcept>
#include <string>

namespace ddpc {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct SignalTooShort : Error {
  using Error::Error;
};

struct DegenerateData : Error {
  using Error::Error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct OutOfDomain : Error {
  using Error::Error;
};

struct NegativeDuration : Error {
  using Error::Error;
};

struct StepTooLong : Error {
  using Error::Error;
};

struct BufferNotWarm : Error {
  using Error::Error;
};

struct NonMonotonicTime : Error {
  using Error::Error;
};

struct SolverNotOptimal : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct MissingRuns : Error {
  using Error::Error;
};

}  // namespace ddpc
