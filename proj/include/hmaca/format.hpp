#pragma once

// Locale-independent number rendering.

#include <string>

namespace hmaca {

/// Fixed-point with `precision` decimals, '.' separator.
std::string format_fixed(double value, int precision);

/// Shortest decimal form that parses back to the same double.
std::string format_shortest(double value);

/// Strict decimal parse of the whole string; throws Error(ModelFormat) on failure.
double parse_double(const std::string& text);

}  // namespace hmaca
