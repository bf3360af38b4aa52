#pragma once

#include <stdexcept>
#include <string>

namespace rdmd {

// Base class for all recoverable failures raised by the library.  The CLI
// maps these to exit code 1; argument/usage problems are handled by the
// parser and exit with code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input with values the algorithms cannot accept
// (dimension mismatches, non-finite entries, bad configuration).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Fewer samples than the requested computation needs.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Malformed file content; the message names the offending row/column
// or key where possible.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Runtime numerical failure: divergence during integration, singular
// systems that cannot be salvaged, non-finite intermediate results.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdmd
