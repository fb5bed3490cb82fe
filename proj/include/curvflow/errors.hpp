#pragma once

#include <stdexcept>
#include <string>

namespace curvflow {

/// Malformed curvature-function expression or configuration text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (e.g. k > n for ek-root, a non-positive principal curvature).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A profile whose curvature (or principal radius) is not strictly positive.
class NonConvex : public std::runtime_error {
 public:
  NonConvex(const std::string& what, int node, double theta, double value)
      : std::runtime_error(what), node_(node), theta_(theta), value_(value) {}

  int node() const noexcept { return node_; }
  double theta() const noexcept { return theta_; }
  double value() const noexcept { return value_; }

 private:
  int node_;
  double theta_;
  double value_;
};

/// Radial profile whose slope at a pole is not (numerically) zero.
class PoleIrregular : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid flow / run configuration. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownPreset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveValues : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curvflow
