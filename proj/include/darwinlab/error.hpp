#pragma once

#include <stdexcept>
#include <string>

namespace darwinlab {

enum class ErrorKind {
  invalid_parameter,
  configuration,
  numerical,
  singularity,
  collision,
  escape,
  resource_guard,
  internal_invariant,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the Darwin integrator when a collision or escape sentinel fires.
class SentinelError : public Error {
 public:
  SentinelError(ErrorKind kind, double time, const std::string& what)
      : Error(kind, what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::invalid_parameter, what);
}

const char* to_string(ErrorKind kind) noexcept;

// Process exit code for the CLI: 2 configuration, 3 numerical, 4 sentinel, 5 resource guard.
int exit_code(ErrorKind kind) noexcept;

}  // namespace darwinlab
