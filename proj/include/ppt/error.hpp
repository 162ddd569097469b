#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppt {

enum class ErrorKind {
  invalid_argument,
  unsupported_dimension,
  envelope_violation,
  sampling_hardness,
  quadrature_failure,
  validation,
  parse,
  internal_consistency,
  undefined_input,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` says which contract failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ppt
