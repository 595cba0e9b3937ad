#pragma once

#include <stdexcept>
#include <string>

namespace hetcov {

/// Raised when an iterative method or quadrature fails to converge.
/// The message carries the arguments of the failing call.
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on invalid scenario files, malformed parameters, or argument
/// values outside an operation's domain.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a formula is asked to evaluate a configuration it does not
/// cover (e.g. the interference-aware combiner beyond two Rx antennas).
class unsupported_error : public std::runtime_error {
  public:
    explicit unsupported_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hetcov
