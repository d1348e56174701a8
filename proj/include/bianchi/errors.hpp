#pragma once

#include <stdexcept>
#include <string>

namespace bianchi {

/// Operands of incompatible dimension.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix used as a metric point failed the positive-definiteness test.
class NotPositiveDefinite : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Input violates a documented precondition (non-unimodular algebra,
/// degenerate plane, out-of-range parameter, malformed file, ...).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bianchi
