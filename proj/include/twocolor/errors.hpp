#pragma once

#include <stdexcept>
#include <string>

namespace twocolor {

// Base error for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// Bad user input / malformed configuration or data files. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

// Physical-domain violation (wavelength outside a model's validity range,
// probability out of bounds, ...). CLI exit code 1.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

// Registry lookups that found nothing (unknown material/axis/source).
class LookupError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "lookup"; }
};

// Root finders / minimizers that could not bracket or converge.
class SolverError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "solver"; }
};

// Degenerate or insufficient data handed to a fitting routine.
class FitError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "fit"; }
};

// Missing or inconsistent measurement records.
class DataError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data"; }
};

}  // namespace twocolor
