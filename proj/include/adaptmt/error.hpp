#pragma once

#include <stdexcept>
#include <string>

namespace adaptmt {

// Bad input: malformed config, invariant violation, wrong lifecycle stage.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce a result (unbracketed root,
// failed factorization, integration budget exhausted).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adaptmt
