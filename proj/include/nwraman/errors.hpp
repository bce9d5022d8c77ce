#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nwraman {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Discrete maximum sits on the first or last sample.
class NoPeakError : public Error {
 public:
  using Error::Error;
};

/// A half-maximum crossing is missing on one side of the peak.
class IncompletePeakError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// Stokes/anti-Stokes ratio that admits no positive Boltzmann temperature.
class NonphysicalRatioError : public Error {
 public:
  using Error::Error;
};

class NoFitError : public Error {
 public:
  using Error::Error;
};

}  // namespace nwraman
