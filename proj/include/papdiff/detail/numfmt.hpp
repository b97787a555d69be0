#pragma once

#include <charconv>
#include <string>

namespace papdiff::detail {

// Shortest decimal form that round-trips through binary64.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace papdiff::detail
