#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace stlmpc {

/// Error type thrown by all modules for contract violations and bad input.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest-ish round-trippable decimal rendering of a double.
inline std::string format_double(double v) {
  char buf[64];
  // %.17g always round-trips; try shorter forms first for readable output.
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace stlmpc
