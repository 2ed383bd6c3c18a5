#pragma once

#include <stdexcept>
#include <string>

namespace sdestab {

/// Argument outside the mathematical domain of an operation (t <= 0, p < 1, non-finite x, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A precondition on an object was not met (e.g. mollifying an unbounded coefficient).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Missing or malformed configuration. `path()` names the offending key or metadata field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace sdestab
