#include "hmaca/format.hpp"

#include <array>
#include <charconv>
#include <system_error>

#include "hmaca/error.hpp"

namespace hmaca {

std::string format_fixed(double value, int precision) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, precision);
  return std::string(buf.data(), res.ptr);
}

std::string format_shortest(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw Error(Errc::ModelFormat, "not a number: '" + text + "'");
  }
  return value;
}

}  // namespace hmaca
