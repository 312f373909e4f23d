#pragma once

#include <stdexcept>
#include <string>

namespace hrisk {

/// Invalid user input: malformed config, out-of-range parameter, unknown key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation produced a result that signals a broken internal state,
/// e.g. an importance-sampling estimate above 1.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hrisk
