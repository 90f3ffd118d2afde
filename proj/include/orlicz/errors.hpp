// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orlicz {

/// Argument outside the mathematical domain of an operation (negative t, u on the wrong grid, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation requested beyond a tabulated horizon.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// A function handed in as a Young function fails the defining properties.
class InvalidYoungFunction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A growth or integrability condition needed by a construction does not hold.
class ConditionFailure : public std::runtime_error {
 public:
  ConditionFailure(std::string condition, const std::string& what)
      : std::runtime_error(condition + ": " + what), condition_(std::move(condition)) {}

  [[nodiscard]] const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// Configuration / input parsing failure. `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace orlicz
