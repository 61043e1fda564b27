#pragma once

#include <cstdio>
#include <string>

namespace poolgame {

// All CSV output is pinned to 6 significant digits so fixed inputs give
// byte-identical files across runs.
inline std::string fmt_g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace poolgame
