#pragma once

#include <stdexcept>
#include <string>

namespace majvote {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kData = 3,
  kBundle = 4,
};

/// Base class of every error raised by the library. Each subclass maps to one
/// exit code so the CLI can translate failures without string matching.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Invalid configuration or arguments (bad ratio, unknown key, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ExitCode::kConfig, what) {}
};

/// Problems with input data: unreadable files, malformed CSV, bad labels,
/// inconsistent feature widths.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

/// Model bundle could not be read or written.
class BundleError : public Error {
 public:
  explicit BundleError(const std::string& what)
      : Error(ExitCode::kBundle, what) {}
};

}  // namespace majvote
