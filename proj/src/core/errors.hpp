#pragma once

#include <stdexcept>
#include <string>

namespace vlaser {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: parameter out of range, malformed config, inconsistent grid.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration text: bad syntax, unknown key, unparseable value.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-convergence, singular system, step underflow.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Filesystem / output failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vlaser
