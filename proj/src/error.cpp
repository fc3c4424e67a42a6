#include "sublin/error.hpp"

namespace sublin {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::invalid_model: return "invalid-model";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::model_too_large: return "model-too-large";
    case ErrorKind::null_history: return "null-history";
    case ErrorKind::no_common_lattice: return "no-common-lattice";
    case ErrorKind::state_explosion: return "state-explosion";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::precondition: return "precondition";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::configuration:
    case ErrorKind::precondition:
      return 1;
    case ErrorKind::invalid_model:
    case ErrorKind::null_history:
    case ErrorKind::no_common_lattice:
      return 2;
    case ErrorKind::numerical_failure:
      return 3;
    case ErrorKind::model_too_large:
    case ErrorKind::state_explosion:
      return 4;
  }
  return 1;
}

}  // namespace sublin
