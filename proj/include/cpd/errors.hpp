#pragma once

#include <stdexcept>
#include <string>

namespace cpd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Field evaluated outside its domain (e.g. on a singular axis).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// |B(x)| too small for quantities that divide by it.
class DegenerateField : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class MaxStepsExceeded : public Error {
 public:
  using Error::Error;
};

class StiffnessSuspected : public Error {
 public:
  using Error::Error;
};

}  // namespace cpd
