#pragma once

#include <stdexcept>
#include <string>

namespace socialsim {

/// Base of every error thrown by the library. `kind()` is a short stable tag
/// used in the CLI's machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

struct LookupError : Error {
  explicit LookupError(const std::string& what) : Error("lookup", what) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

struct ParseError : Error {
  ParseError(std::string field, const std::string& what)
      : Error("parse", what), field_(std::move(field)) {}

  /// Name of the field (or record location) that failed to parse.
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io", what) {}
};

struct MetricError : Error {
  explicit MetricError(const std::string& what) : Error("metric", what) {}
};

}  // namespace socialsim
