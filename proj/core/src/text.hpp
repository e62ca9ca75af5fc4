#pragma once

// Small text helpers shared by the parsers and writers. Everything here is
// locale-independent.

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace hbias::detail {

// Yields non-empty, non-comment lines with any trailing '\r' removed.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source, bool skip_comments = true)
      : in_(in), source_(std::move(source)), skip_comments_(skip_comments) {}

  std::optional<std::string_view> next() {
    while (std::getline(in_, buf_)) {
      ++number_;
      if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
      if (buf_.empty()) continue;
      if (skip_comments_ && buf_.front() == '#') continue;
      return std::string_view(buf_);
    }
    return std::nullopt;
  }

  std::size_t number() const { return number_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  bool skip_comments_;
  std::string buf_;
  std::size_t number_ = 0;
};

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if constexpr (std::is_integral_v<T>) {
    if (*first == '+') ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_uint(std::string_view s, std::size_t& out) { return parse_number(s, out); }

// Fixed notation with `decimals` digits after the point.
inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  if (ec != std::errc()) return "nan";
  std::string out(buf, ptr);
  if (out.starts_with("-") && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

// Shortest general notation with at most `digits` significant digits.
inline std::string format_general(double v, int digits) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace hbias::detail
