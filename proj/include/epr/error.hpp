#pragma once

#include <stdexcept>
#include <string>

namespace epr {

/// Base of every error thrown by the library. `kind()` is a short machine
/// readable tag used by the CLI when it reports failures as JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A configuration value violates a documented invariant.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

/// Input data (streams, counts) violates a precondition such as sortedness.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("input", what) {}
};

/// A file could not be parsed. Carries the 1-based line and the field name.
class ParseError : public Error {
 public:
  ParseError(std::string file, int line, std::string field, const std::string& what)
      : Error("parse", file + ":" + std::to_string(line) + ": field '" + field + "': " + what),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  int line_;
  std::string field_;
};

}  // namespace epr
