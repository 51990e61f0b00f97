#pragma once

#include <stdexcept>
#include <string>

namespace mlmc {

// Invalid arguments are reported with std::invalid_argument throughout.

// A processor/sample configuration that cannot be realized on the machine.
class InfeasibleConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A single sample could not be computed (e.g. the solver diverged).
class SampleFailed : public std::runtime_error {
 public:
  SampleFailed(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

// Malformed configuration input; carries the offending line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace mlmc
