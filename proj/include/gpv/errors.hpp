#pragma once

#include <stdexcept>
#include <string>

namespace gpv {

/// Bad user input: missing keys, out-of-range parameters, malformed files.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failure of a numerical procedure: singular factorization, root not
/// bracketed, diverging iteration.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Inconsistent or degenerate mesh data.
class MeshError : public std::runtime_error {
public:
  explicit MeshError(const std::string& msg) : std::runtime_error(msg) {}
};

/// I/O failure with path context.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gpv
