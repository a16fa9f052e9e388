#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace acquaint {

enum class ErrorKind {
  invalid_parameter,
  invalid_input,
  parse_error,
  not_eulerian,
  not_connected,
  unsupported,
  generation_failure,
  resource_limit,
  budget_exceeded,
  no_convergence,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported as Error; `kind` tells callers (and the
// CLI exit-code mapping) which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace acquaint
