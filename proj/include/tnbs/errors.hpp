#pragma once

#include <stdexcept>
#include <string>

namespace tnbs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes of two things that must agree do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematically valid range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Charge labels of neighbouring tensors do not fit together.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Occupation does not fit into the truncated local Fock space.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Input fails a validation check (e.g. a matrix that should be unitary).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Dense problem too large for brute-force enumeration.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::string sector)
      : Error(what + " (sector " + sector + ")"), sector_(std::move(sector)) {}

  const std::string& sector() const { return sector_; }

 private:
  std::string sector_;
};

class ParseError : public Error {
 public:
  ParseError(std::string key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace tnbs
