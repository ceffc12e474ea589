#include "landscape/error.hpp"

#include <cstdio>

namespace landscape {

std::string format_point(const double* values, std::size_t count) {
  std::string out = "(";
  constexpr std::size_t kMaxShown = 8;
  for (std::size_t i = 0; i < count && i < kMaxShown; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    if (i > 0) out += ", ";
    out += buf;
  }
  if (count > kMaxShown) out += ", ...";
  out += ")";
  return out;
}

}  // namespace landscape
