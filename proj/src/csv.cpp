#include "credrisk/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>

#include "credrisk/error.hpp"

namespace credrisk::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<std::vector<std::string>> Reader::next() {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  bool field_was_quoted = false;
  int c;
  while ((c = in_.get()) != std::char_traits<char>::eof()) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      in_quotes = true;
      field_was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(field_was_quoted ? field : std::string(trim(field)));
      field.clear();
      field_was_quoted = false;
    } else if (ch == '\n') {
      if (fields.empty() && field.empty() && !field_was_quoted) {
        any = false;  // blank line
        continue;
      }
      break;
    } else if (ch == '\r') {
      continue;
    } else {
      field.push_back(ch);
    }
  }
  if (in_quotes) {
    fail(ErrorCode::MalformedRow,
         "row " + std::to_string(record_number_ + 1) + ": unterminated quoted field");
  }
  if (!any) return std::nullopt;
  fields.push_back(field_was_quoted ? field : std::string(trim(field)));
  if (first_) {
    first_ = false;
    if (fields.front().rfind("\xEF\xBB\xBF", 0) == 0) fields.front().erase(0, 3);
  }
  ++record_number_;
  return fields;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line.push_back(',');
    line += escape(fields[i]);
  }
  return line;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && ptr == text.data() + text.size()) return value;
  // Accept integral floats such as "2.0", which some exports produce.
  auto as_double = parse_double(text);
  if (as_double && std::floor(*as_double) == *as_double && std::fabs(*as_double) < 9.0e15) {
    return static_cast<std::int64_t>(*as_double);
  }
  return std::nullopt;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) fail(ErrorCode::Internal, "number formatting failed");
  return std::string(buf, ptr);
}

}  // namespace credrisk::csv
