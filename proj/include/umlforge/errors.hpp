#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace umlforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A diagram failed structural validation where a valid one was required.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported SQL DDL.
class DdlError : public Error {
 public:
  DdlError(const std::string& message, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Transport or protocol failure talking to an LLM backend.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// A backend response could not be parsed into the expected shape.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A backend response parsed but violated the intermediate-model schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (missing endpoint, API key, fixture directory...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Wraps the first unrecoverable error of a pipeline run with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace umlforge
