#pragma once

#include <stdexcept>
#include <string>

namespace impdelay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (offset outside [-tau, 0], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A query reaches outside the time span a trajectory or history actually stores.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// A query on an explicit impulse list goes past its declared horizon.
class HorizonError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration: bad parameters, unparsable files, missing fields.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An operation was called for a sigma case it does not handle.
class WrongCaseError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// The simulated state became non-finite or exceeded the blow-up threshold.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace impdelay
