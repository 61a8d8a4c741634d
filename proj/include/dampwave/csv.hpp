#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace dampwave {

/// Round-trippable, locale-independent decimal rendering (%.17g).
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv_row(std::ostream& out, std::initializer_list<double> cols) {
  bool first = true;
  for (double c : cols) {
    if (!first) out << ',';
    out << format_double(c);
    first = false;
  }
  out << '\n';
}

inline void write_csv_header(std::ostream& out, std::initializer_list<std::string_view> cols) {
  bool first = true;
  for (auto c : cols) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

}  // namespace dampwave
