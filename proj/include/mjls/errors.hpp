#pragma once

#include <stdexcept>
#include <string>

namespace mjls {

/// A square matrix failed row-stochasticity validation (negative entry or a
/// row sum off by more than the tolerance).
class NonStochasticError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A renewal distribution whose hazard recursion leaves the unit interval.
class DegenerateDistributionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Some closed communicating class of the observation chain never meets the
/// observation set, so observation times would not be almost-surely infinite.
class LambdaNotRecurrentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatchError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A gain denominator G is numerically singular. Cannot occur for a genuinely
/// feasible LMI point; treated as a solver-quality failure.
class SingularGainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Config-file parsing or validation failure, carrying the offending field path.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field_path, const std::string& message)
      : std::runtime_error(field_path + ": " + message), field_path_(std::move(field_path)) {}

  const std::string& field_path() const { return field_path_; }

private:
  std::string field_path_;
};

}  // namespace mjls
