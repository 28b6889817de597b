#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace guardrail {

using Json = nlohmann::json;

// Canonical serialization: keys sorted, no whitespace, doubles in shortest
// round-trip form, UTF-8. Digests are computed over this form.
std::string canonical_dump(const Json& j);

// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

// Shortest decimal that round-trips to `v`.
std::string shortest(double v);

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

// Reads a whole file; Error(io) when it cannot be opened.
std::string read_file(const std::string& path);
Json read_json_file(const std::string& path);

}  // namespace guardrail
