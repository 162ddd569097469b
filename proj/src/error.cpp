#include "ppt/error.hpp"

namespace ppt {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::unsupported_dimension: return "unsupported dimension";
    case ErrorKind::envelope_violation: return "envelope violation";
    case ErrorKind::sampling_hardness: return "sampling hardness";
    case ErrorKind::quadrature_failure: return "quadrature failure";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::internal_consistency: return "internal consistency";
    case ErrorKind::undefined_input: return "undefined input";
  }
  return "error";
}

}  // namespace ppt
