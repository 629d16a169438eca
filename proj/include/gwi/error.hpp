#pragma once

#include <stdexcept>
#include <string>

namespace gwi {

// Base for every error the library raises on bad input. Subclasses map onto
// the CLI exit-code contract (arity/domain/capacity/validation -> 65).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong number of parties, or arities that disagree between arguments.
class ArityError : public Error {
 public:
  using Error::Error;
};

// Argument outside its mathematical domain (v outside [0,1], non-unit Bloch
// vector, non-finite angle, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Problem size beyond what an exhaustive routine supports.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Malformed structured input (behaviors, settings files, states).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gwi
