#pragma once

#include <stdexcept>
#include <string>

namespace sublin {

enum class ErrorKind {
  usage,
  invalid_model,
  numerical_failure,
  model_too_large,
  null_history,
  no_common_lattice,
  state_explosion,
  configuration,
  precondition,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

// Process exit code: 1 usage, 2 invalid model, 3 numerical failure,
// 4 model too large.
[[nodiscard]] int exit_code(ErrorKind kind) noexcept;

}  // namespace sublin
