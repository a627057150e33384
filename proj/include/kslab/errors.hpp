#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kslab {

// Base class of every library error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user input: bad flags, malformed config or data files.
struct ConfigError : Error {
  using Error::Error;
};

// A precondition of an operation does not hold (out-of-range argument,
// wrong functional for the dimension, nonpositive slope where one is required).
struct DomainError : Error {
  using Error::Error;
};

// A numerical procedure failed (step control, linear solve, eigensolve, NaN).
struct NumericalError : Error {
  using Error::Error;
};

// Requested mass at or above the critical mass M: no steady state exists.
struct SupercriticalError : Error {
  using Error::Error;
};

struct IntegrationError : NumericalError {
  IntegrationError(const std::string& msg, double last_x_)
      : NumericalError(msg), last_x(last_x_) {}
  double last_x;
};

struct ModelViolationError : NumericalError {
  using NumericalError::NumericalError;
};

struct LinearAlgebraError : NumericalError {
  using NumericalError::NumericalError;
};

struct SpectralError : NumericalError {
  SpectralError(const std::string& msg, double last_quotient_)
      : NumericalError(msg), last_quotient(last_quotient_) {}
  double last_quotient;
};

struct InstabilityError : NumericalError {
  InstabilityError(const std::string& msg, double t_, double umin_, double umax_)
      : NumericalError(msg), t(t_), umin(umin_), umax(umax_) {}
  double t;
  double umin;
  double umax;
};

// Initial datum outside Y_m; `clause` names the violated membership condition.
struct YmError : DomainError {
  YmError(const std::string& msg, std::string clause_)
      : DomainError(msg), clause(std::move(clause_)) {}
  std::string clause;
};

struct DivergentWeightError : DomainError {
  using DomainError::DomainError;
};

struct RangeError : DomainError {
  using DomainError::DomainError;
};

struct WrongFunctionalError : DomainError {
  using DomainError::DomainError;
};

struct NonpositiveSlopeError : DomainError {
  NonpositiveSlopeError(const std::string& msg, std::size_t cell_)
      : DomainError(msg), cell(cell_) {}
  std::size_t cell;
};

struct InsufficientSamplesError : DomainError {
  using DomainError::DomainError;
};

struct AllBelowFloorError : DomainError {
  using DomainError::DomainError;
};

struct IoError : ConfigError {
  using ConfigError::ConfigError;
};

struct ParseError : ConfigError {
  ParseError(const std::string& msg, std::size_t line_)
      : ConfigError(msg), line(line_) {}
  std::size_t line;
};

}  // namespace kslab
