#include <cctype>

#include "guardrail/error.hpp"
#include "guardrail/peers.hpp"

namespace guardrail {

namespace {

std::string fold(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out;
  out.reserve(s.size());
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

AliasTable AliasTable::from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::invalid_input, "alias table must be a JSON object");
  AliasTable table;
  for (const auto& [id, aliases] : j.items()) {
    if (!aliases.is_array() || aliases.empty()) {
      fail(ErrorKind::invalid_input, "alias entry '" + id + "' must be a non-empty array");
    }
    table.display_[id] = aliases.front().get<std::string>();
    table.lookup_[fold(id)] = id;
    for (const auto& a : aliases) table.lookup_[fold(a.get<std::string>())] = id;
  }
  return table;
}

AliasTable AliasTable::load(const std::vector<std::string>& paths) {
  AliasTable table;
  for (const auto& p : paths) table.merge(from_json(read_json_file(p)));
  return table;
}

void AliasTable::merge(const AliasTable& other) {
  for (const auto& [k, v] : other.lookup_) lookup_[k] = v;
  for (const auto& [k, v] : other.display_) display_[k] = v;
}

std::optional<std::string> AliasTable::normalize(std::string_view name) const {
  auto it = lookup_.find(fold(name));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::string AliasTable::display_name(std::string_view id) const {
  auto it = display_.find(id);
  return it == display_.end() ? std::string(id) : it->second;
}

}  // namespace guardrail
