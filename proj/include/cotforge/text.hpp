#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cotforge {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Shortest representation that round-trips; integers print without ".0".
std::string format_double(double v);

// Fixed-point with `digits` decimals, for report tables.
std::string format_fixed(double v, int digits);

}  // namespace cotforge
