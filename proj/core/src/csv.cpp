#include "guardrail/csv.hpp"

#include "guardrail/error.hpp"

namespace guardrail::csv {

std::optional<std::vector<std::string>> Reader::next() {
  if (first_) {
    first_ = false;
    if (in_.peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
    }
  }
  if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;

  record_line_ = line_;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;

  for (;;) {
    int ch = in_.get();
    if (ch == std::char_traits<char>::eof()) {
      if (quoted) {
        fail(ErrorKind::invalid_input,
             "unterminated quoted field starting on line " + std::to_string(record_line_));
      }
      fields.push_back(std::move(field));
      return fields;
    }
    char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\r') {
      if (in_.peek() == '\n') in_.get();
      ++line_;
      fields.push_back(std::move(field));
      return fields;
    } else if (c == '\n') {
      ++line_;
      fields.push_back(std::move(field));
      return fields;
    } else {
      field += c;
    }
  }
}

}  // namespace guardrail::csv
