#pragma once

#include <string>
#include <vector>

namespace anisobound {

/// Shortest-safe decimal for binary64: 17 significant digits, round-trips exactly.
std::string fmt17(double value);

/// Values joined by `sep` using fmt17.
std::string join17(const std::vector<double>& values, char sep);

/// Parses a full decimal literal (no trailing garbage); throws std::invalid_argument.
double parse_double(const std::string& text);

}  // namespace anisobound
