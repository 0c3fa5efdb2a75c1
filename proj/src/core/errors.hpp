#pragma once

#include <stdexcept>
#include <string>

namespace recoil {

// Error taxonomy mirrored by the C API status codes and CLI exit codes:
// config errors -> 2, input-data errors -> 3, internal invariants -> 4.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a multi-dip fit cannot locate the requested number of dips.
class ResolveError : public InputError {
 public:
  ResolveError(const std::string& what, int resolved)
      : InputError(what), resolved_count(resolved) {}
  int resolved_count;
};

}  // namespace recoil
