#pragma once

#include <stdexcept>
#include <string>

namespace tzlab {

/// Malformed input: bad shapes, non-integer weights, unnormalizable points.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition does not hold (off-ray point, singular Gram
/// matrix, missing positivity certificate, ...).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Isotype enumeration was requested without a positivity certificate, so
/// finiteness of the isotype is not guaranteed.
class UnboundedIsotypeError : public PreconditionError {
 public:
  UnboundedIsotypeError()
      : PreconditionError("unbounded isotype risk: action has no positivity certificate (0 in conv of weights)") {}
};

}  // namespace tzlab
