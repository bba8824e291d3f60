#pragma once

#include <string>
#include <string_view>

namespace orthomart {

/// Shortest decimal text that parses back to the same double; locale-independent.
std::string format_double(double x);

/// Locale-independent parse of the whole of `text`. Throws std::invalid_argument.
double parse_double(std::string_view text);

}  // namespace orthomart
