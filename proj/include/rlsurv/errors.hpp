#pragma once

#include <stdexcept>
#include <string>

namespace rlsurv {

/// Input file violates an expected schema (missing column, bad label value).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A cell or token could not be parsed as the expected type.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An update produced non-finite parameters.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation requested before its preconditions are met (e.g. sampling an
/// under-filled replay buffer). Callers are expected to test readiness first.
struct NotReadyError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Filesystem write failed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rlsurv
