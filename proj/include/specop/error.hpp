#pragma once

#include <stdexcept>
#include <string>

namespace specop {

/// Bad user input: malformed files, invalid shapes, out-of-range parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The data were fine but a computation could not be completed
/// (degenerate spectral estimate, too many rejected bootstrap draws, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specop
