#include "anisobound/format.hpp"

#include <cerrno>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace anisobound {

std::string fmt17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string join17(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += fmt17(values[i]);
  }
  return out;
}

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v) ||
      (errno == ERANGE && std::abs(v) > std::numeric_limits<double>::min())) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

}  // namespace anisobound
