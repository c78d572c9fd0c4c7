#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace fssaudit {

// Shortest representation that round-trips.
inline std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string fmt_fixed(double v, int decimals) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    if (s.front() == '-') s.erase(0, 1);
  }
  return s;
}

}  // namespace fssaudit
