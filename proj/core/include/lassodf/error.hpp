#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lassodf {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (bad CSV cell, constant column, n < 2, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's domain (negative lambda, sigma2 <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A Cholesky pivot fell below tolerance: the active columns are (numerically)
// linearly dependent.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, std::ptrdiff_t index)
      : Error(what), index_(index) {}
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

// Two path events coincide, i.e. the one-at-a-time condition fails. The
// response lies on one of the finitely many hyperplanes where this happens;
// an infinitesimal jitter of y moves it off.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// An iterative procedure stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace lassodf
