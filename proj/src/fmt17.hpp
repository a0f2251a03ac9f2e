#pragma once

#include <cstdio>
#include <string>

namespace jacnet {

// 17 significant digits: enough to round-trip any fp64.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace jacnet
