#pragma once

#include <string>
#include <string_view>

namespace motilab {

// Shortest decimal that round-trips the exact double value.
std::string format_double(double x);
void append_double(std::string& out, double x);

// Strict full-string parse; throws std::invalid_argument on anything else.
double parse_double(std::string_view s);

}  // namespace motilab
