#pragma once

#include <stdexcept>
#include <string>

namespace sqzloop {

// Argument outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Shape/unit mismatch between values that must agree (grids, unit tags).
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// |1 - sqrt(t) G| collapsed to (near) zero at a specific frequency.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(double frequency_hz, double magnitude);

  double frequency_hz() const noexcept { return frequency_hz_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  double frequency_hz_;
  double magnitude_;
};

// A scenario parameter violates a component invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Config text could not be parsed; carries the 1-based line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace sqzloop
