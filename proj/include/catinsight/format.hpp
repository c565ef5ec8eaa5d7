#pragma once

#include <string>
#include <string_view>

namespace catinsight {

// Shortest text that parses back to exactly `value`.
std::string format_number(double value);

// Strict parse of a whole string; throws DataError naming `what` on failure.
double parse_number(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

} // namespace catinsight
