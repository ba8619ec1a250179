#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace votespan {

/// 12 significant digits; the convention for every printed result value.
inline std::string fmt_g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// 17 significant digits; round-trips a double exactly. Used for data dumps.
inline std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string json_array_g12(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt_g12(xs[i]);
  }
  out += "]";
  return out;
}

template <typename Int>
std::string json_array_int(const std::vector<Int>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  out += "]";
  return out;
}

}  // namespace votespan
