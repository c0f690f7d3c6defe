#pragma once

// Plain-text point files: one "x y" pair per line, '#' starts a comment
// line, blank lines are skipped.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <functional>
#include <unordered_map>
#include <vector>

#include "meshvor/kernel.hpp"

namespace meshvor {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

inline std::string_view next_token(std::string_view& s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  std::size_t j = i;
  while (j < s.size() && !is_space(s[j])) ++j;
  const std::string_view tok = s.substr(i, j - i);
  s.remove_prefix(j);
  return tok;
}

inline double parse_coordinate(std::string_view tok, std::size_t line) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects a leading '+'
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
  if (ec == std::errc::result_out_of_range) throw ParseError("coordinate out of range: '" + std::string(tok) + "'", line);
  if (ec != std::errc() || ptr != last) throw ParseError("not a number: '" + std::string(tok) + "'", line);
  if (!std::isfinite(v)) throw ParseError("coordinate is not finite: '" + std::string(tok) + "'", line);
  return v == 0.0 ? 0.0 : v;  // fold -0 into +0
}

inline std::uint64_t bits(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace detail

/// Parses a point file. Rejects malformed lines and duplicate points with
/// the offending line number.
inline std::vector<Point> read_points(std::istream& in) {
  struct Key {
    std::uint64_t x, y;
    bool operator==(const Key&) const = default;
  };
  struct Hash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>()(k.x * 0x9e3779b97f4a7c15ull ^ k.y); }
  };
  std::vector<Point> out;
  std::unordered_map<Key, std::size_t, Hash> first_line;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s(raw);
    std::string_view probe = s;
    const std::string_view first = detail::next_token(probe);
    if (first.empty() || first.front() == '#') continue;
    const std::string_view xs = detail::next_token(s);
    const std::string_view ys = detail::next_token(s);
    if (ys.empty()) throw ParseError("expected two coordinates", line);
    if (!detail::next_token(s).empty()) throw ParseError("trailing text after two coordinates", line);
    const Point p{detail::parse_coordinate(xs, line), detail::parse_coordinate(ys, line)};
    const auto [it, fresh] = first_line.try_emplace(Key{detail::bits(p.x), detail::bits(p.y)}, line);
    if (!fresh) throw ParseError("duplicate point (first seen on line " + std::to_string(it->second) + ")", line);
    out.push_back(p);
  }
  return out;
}

inline std::vector<Point> read_points_string(const std::string& text) {
  std::istringstream in(text);
  return read_points(in);
}

/// Shortest decimal that parses back to exactly v.
inline std::string format_coordinate(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

inline void write_points(std::ostream& out, const std::vector<Point>& pts) {
  for (const Point& p : pts) out << format_coordinate(p.x) << ' ' << format_coordinate(p.y) << '\n';
}

}  // namespace meshvor
