#include "guardrail/error.hpp"

namespace guardrail {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::provider: return "provider";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace guardrail
