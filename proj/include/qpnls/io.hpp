#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "qpnls/errors.hpp"

namespace qpnls {

// Shortest round-trip decimal form via std::to_chars: locale-independent,
// byte-reproducible, parses back to the identical double.
inline std::string fmt_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw error("fmt_double: to_chars failed");
  return std::string(buf, ptr);
}

inline std::string fmt_int(std::int64_t x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw error("fmt_int: to_chars failed");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw parse_error("bad number: '" + std::string(s) + "'");
  return v;
}

inline std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw parse_error("bad integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace qpnls
