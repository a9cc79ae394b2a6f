#pragma once

#include <stdexcept>
#include <string>

namespace kgfuse {

// Process exit codes shared by the CLI.
enum class ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kDataError = 2,
  kDiverged = 3,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const noexcept = 0;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kConfigError; }
};

class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kDataError; }
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, long step) : Error(what), step_(step) {}
  ExitCode exit_code() const noexcept override { return ExitCode::kDiverged; }
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace kgfuse
