#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace credrisk::csv {

// Comma-separated, double-quote quoting with "" escapes; quoted fields may
// span lines. A UTF-8 byte-order mark on the first record is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Blank lines are skipped.
  std::optional<std::vector<std::string>> next();

  // 1-based index of the record most recently returned (header = 1).
  std::size_t record_number() const { return record_number_; }

 private:
  std::istream& in_;
  std::size_t record_number_ = 0;
  bool first_ = true;
};

std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace credrisk::csv
