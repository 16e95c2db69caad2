#pragma once

#include <stdexcept>
#include <string>

namespace tomokit {

// Root of every error the library throws. The CLI maps these onto exit code 3
// and reports kind() in its stderr JSON.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// Invalid argument, pole, or a representation that does not apply.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "non-convergence"; }
};

class QuadratureError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "quadrature-failure"; }
};

// mu^2 + nu^2 == 0: the tomogram collapses to a point mass.
class DegenerateFrameError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "degenerate-frame"; }
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported"; }
};

class FrameMismatchError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "frame-mismatch"; }
};

class DivergentNormalizerError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "divergent-normalizer"; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse"; }
};

}  // namespace tomokit
