#pragma once

#include <stdexcept>

namespace dcf {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user-supplied value: parameter, probability, argument or config key.
struct InvalidArgumentError : Error {
  using Error::Error;
};

// Offered load at or above capacity; the analytic formulas have no value there.
struct UnstableLoadError : Error {
  using Error::Error;
};

// An iterative solver hit its iteration cap before reaching tolerance.
struct NoConvergenceError : Error {
  using Error::Error;
};

// A simulated queue exceeded the configured cap (runaway backlog).
struct QueueOverflowError : Error {
  using Error::Error;
};

// A trace statistic was requested from a trace with no usable content.
struct DegenerateTraceError : Error {
  using Error::Error;
};

// Replication set produced fewer than two usable runs.
struct AllRunsUnstableError : Error {
  using Error::Error;
};

}  // namespace dcf
