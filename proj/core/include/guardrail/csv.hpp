#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace guardrail::csv {

// RFC 4180 record reader: quoted fields, doubled quotes, CRLF or LF line
// endings, embedded newlines inside quotes. A UTF-8 BOM on the first line is
// skipped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Throws Error(invalid_input) on an
  // unterminated quoted field.
  std::optional<std::vector<std::string>> next();

  // 1-based physical line where the most recently returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

}  // namespace guardrail::csv
