#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace coopd2d::csv {

/// Shortest round-trip decimal for a double (std::to_chars without precision).
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline void write_field(std::ostream& os, double v) { os << format_double(v); }
inline void write_field(std::ostream& os, float v) { os << format_double(v); }
template <typename T>
  requires std::is_integral_v<T>
void write_field(std::ostream& os, T v) {
  os << v;
}
inline void write_field(std::ostream& os, const char* v) { os << v; }
inline void write_field(std::ostream& os, std::string_view v) { os << v; }
inline void write_field(std::ostream& os, const std::string& v) { os << v; }

/// Writes one CSV row; fields must not contain commas or newlines.
template <typename... Ts>
void write_row(std::ostream& os, const Ts&... fields) {
  bool first = true;
  auto emit = [&](const auto& f) {
    if (!first) os << ',';
    first = false;
    write_field(os, f);
  };
  (emit(fields), ...);
  os << '\n';
}

}  // namespace coopd2d::csv
