#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace guardrail {

enum class ErrorKind {
  invalid_input,     // malformed data or file contents
  invalid_argument,  // caller passed parameters that violate a precondition
  not_found,         // unknown dataset, item, strategy, focal key
  provider,          // peer provider failure (network, parse budget)
  io,                // filesystem
};

std::string_view to_string(ErrorKind kind);

// Every engine failure is reported as an Error; the kind drives CLI exit
// codes and HTTP status mapping in the delivery layer.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace guardrail
