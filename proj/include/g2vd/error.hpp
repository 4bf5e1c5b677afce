#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace g2vd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text or binary input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose parts do not agree (e.g. header size vs payload).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// A planning stage could not produce a result (no route, no path, infeasible profile).
class PlanningError : public Error {
 public:
  using Error::Error;
};

}  // namespace g2vd
