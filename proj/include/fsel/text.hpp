#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace fsel {

/// Shortest decimal form that round-trips to the exact same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Display form: 12 significant digits, trailing zeros trimmed. For console
/// output where one-ulp noise would just distract; files keep full precision.
inline std::string format_display(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

/// Full-string double parse; rejects trailing garbage and empty input.
inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

inline bool parse_int(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

/// Splits one CSV record on commas. Double-quoted cells may contain commas;
/// "" inside quotes is an escaped quote. Surrounding whitespace is kept.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a cell only when it contains a comma, quote, or newline.
std::string csv_escape(std::string_view cell);

}  // namespace fsel
