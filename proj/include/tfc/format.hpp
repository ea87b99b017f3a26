#pragma once

#include <cstdio>
#include <string>

namespace tfc {

// Nine significant digits, the precision used by every CSV/JSON artifact.
inline std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace tfc
