#include "darwinlab/error.hpp"

namespace darwinlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid parameter";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::collision: return "collision";
    case ErrorKind::escape: return "escape";
    case ErrorKind::resource_guard: return "resource guard";
    case ErrorKind::internal_invariant: return "internal invariant";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter:
    case ErrorKind::configuration: return 2;
    case ErrorKind::numerical:
    case ErrorKind::singularity:
    case ErrorKind::internal_invariant: return 3;
    case ErrorKind::collision:
    case ErrorKind::escape: return 4;
    case ErrorKind::resource_guard: return 5;
  }
  return 1;
}

}  // namespace darwinlab
