#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace randlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Unknown symbol or unresolvable name.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, double required, double budget)
      : Error(what + ": enumeration needs " + format(required) +
              " evaluations, budget is " + format(budget)),
        required_(required) {}

  double required() const { return required_; }

 private:
  static std::string format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  double required_;
};

}  // namespace randlab
