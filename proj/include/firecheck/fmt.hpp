// Shortest round-trip decimal formatting for doubles (CSV cells, query text,
// CLI output). Parsing the result back yields the identical bit pattern.
#pragma once

#include <charconv>
#include <string>

namespace firecheck {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace firecheck
