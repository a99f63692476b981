#pragma once

#include <stdexcept>
#include <string>

namespace pulsebench {

// Error categories surfaced by the library. The CLI maps them to exit codes.

// Input data violates an operation's precondition (non-finite samples,
// no valid frames, degenerate geometry, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters are inconsistent (band above Nyquist, mask longer than map, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be parsed: bad magic, unsupported version, truncation.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model and data disagree on shape.
class MismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pulsebench
