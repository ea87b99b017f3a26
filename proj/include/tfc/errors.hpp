#pragma once

#include <stdexcept>
#include <string>

namespace tfc {

// Base for every error raised by the library. Carries the module and the
// operation that failed so the CLI can report them.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string operation, const std::string& what)
      : std::runtime_error(module + "." + operation + ": " + what),
        module_(std::move(module)),
        operation_(std::move(operation)) {}

  const std::string& module() const { return module_; }
  const std::string& operation() const { return operation_; }

 private:
  std::string module_;
  std::string operation_;
};

// Errors that come from the problem itself (infeasible targets, bad grids).
// The CLI maps these to exit status 1.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonFinite : public DomainError {
 public:
  using DomainError::DomainError;
};

class Unstabilizable : public DomainError {
 public:
  using DomainError::DomainError;
};

class NoConvergence : public DomainError {
 public:
  using DomainError::DomainError;
};

class GridExit : public DomainError {
 public:
  using DomainError::DomainError;
};

class NoFeasibleProtocol : public DomainError {
 public:
  using DomainError::DomainError;
};

class CoverageGap : public DomainError {
 public:
  using DomainError::DomainError;
};

class OutOfRange : public DomainError {
 public:
  using DomainError::DomainError;
};

class ExplorationStalled : public DomainError {
 public:
  using DomainError::DomainError;
};

// Bad configuration or unreadable/unwritable files. Exit status 2.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& what)
      : Error("cli-harness", "load_config", key_path + ": " + what),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tfc
