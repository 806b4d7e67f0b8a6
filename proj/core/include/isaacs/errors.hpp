#pragma once

#include <stdexcept>
#include <string>

namespace isaacs {

/// Raised for malformed input files, expressions, or inconsistent settings.
/// Tools map this to exit code 1 and write no artifact.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a numeric routine cannot proceed: step-size restrictions
/// violated, iterations exhausted, quantities leaving their admissible
/// domain mid-run. Tools map this to exit code 2.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Expression evaluation produced NaN/Inf or hit a domain fault.
class EvalError : public SolverError {
public:
  explicit EvalError(const std::string& msg) : SolverError(msg) {}
};

}  // namespace isaacs
