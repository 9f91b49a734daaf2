#pragma once

#include <stdexcept>
#include <string>

namespace ucalib {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A container invariant does not hold (bad row sum, label out of range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An operation was called with arguments outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed; the message carries the location.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A configuration is structurally valid but unusable (empty split, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ucalib
