#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace chtest {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid inputs, violated preconditions, bad configuration files.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Numerical failures: non-convergent integration, failed decompositions.
class NumericError : public Error {
public:
  using Error::Error;
};

/// C(n,k) exceeded the configured enumeration cap. The message names C(n,k).
class CombinatorialOverflow : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Projection onto an all-zero sensing vector.
class DegenerateProjection : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// An iterative solver hit its iteration cap; carries the last iterate.
class IterationLimit : public NumericError {
public:
  IterationLimit(const std::string& what, Eigen::VectorXd iterate)
      : NumericError(what), last_iterate(std::move(iterate)) {}
  Eigen::VectorXd last_iterate;
};

}  // namespace chtest
