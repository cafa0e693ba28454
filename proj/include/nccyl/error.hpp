#pragma once

#include <stdexcept>
#include <string>

namespace nccyl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derivative was evaluated where a square root loses smoothness.
class NonSmoothPoint : public Error {
 public:
  using Error::Error;
};

class NotIntegrable : public Error {
 public:
  using Error::Error;
};

class ToleranceNotMet : public Error {
 public:
  using Error::Error;
};

class HbarMismatch : public Error {
 public:
  using Error::Error;
};

class NotTraceClass : public Error {
 public:
  using Error::Error;
};

class DegenerateParams : public Error {
 public:
  using Error::Error;
};

class ZeroTau : public Error {
 public:
  using Error::Error;
};

class ZeroLambda0 : public Error {
 public:
  using Error::Error;
};

class ZeroMu0 : public Error {
 public:
  using Error::Error;
};

class RatioNotRational : public Error {
 public:
  using Error::Error;
};

class DegenerateCase : public Error {
 public:
  using Error::Error;
};

class ZeroR : public Error {
 public:
  using Error::Error;
};

class SingularMetric : public Error {
 public:
  using Error::Error;
};

class NonConvergent : public Error {
 public:
  using Error::Error;
};

/// Malformed input: bad expression text, bad JSON document, violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::string expected, const std::string& message)
      : Error(message), position_(position), expected_(std::move(expected)) {}

  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace nccyl
