#pragma once

#include <stdexcept>
#include <string>

namespace ncdist {

/// Invalid numeric parameter (theta mismatch, s <= 1, malformed spec, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation called outside its domain (non-radial input, unordered triple, ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The requested quantity does not exist for these inputs, e.g. an analytic
/// upper bound between states of unbounded support.
class NotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ncdist
