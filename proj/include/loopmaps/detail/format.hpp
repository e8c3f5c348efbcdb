#pragma once

#include <cstdio>
#include <string>

namespace loopmaps::detail {

// 17 significant digits: round-trip exact and byte-stable across runs.
inline std::string fmt17(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace loopmaps::detail
