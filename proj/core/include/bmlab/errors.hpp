#pragma once

#include <stdexcept>
#include <string>

namespace bmlab {

/// Input outside an operation's domain (empty sets, negative dilation,
/// out-of-hull tabulated queries, degenerate polygons).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A measure that would be infinite, e.g. Lebesgue measure of a full line.
class InfiniteMeasure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature exhausted its interval budget before meeting tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Request exceeds a hard resource cap (e.g. O(N^4) pairing on a large grid).
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A measure evaluation failed inside a scan; carries the scan parameter
/// (lambda or t) at which it happened.
class EvaluationError : public std::runtime_error {
public:
  EvaluationError(const std::string& what, double parameter)
      : std::runtime_error(what), parameter_(parameter) {}
  double parameter() const { return parameter_; }

private:
  double parameter_;
};

/// Malformed scenario or descriptor; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace bmlab
