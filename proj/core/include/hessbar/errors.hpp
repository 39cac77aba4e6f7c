#pragma once

#include <stdexcept>
#include <string>

namespace hessbar {

// Invalid user-supplied configuration or problem data. CLI maps this to exit code 3.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown inside a solve. CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMetricSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ArmijoExhausted : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficientConstraints : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InfeasibleStart : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class UnsupportedGeometry : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class StructuralMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class Unreachable : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class GenerationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedKind : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace hessbar
