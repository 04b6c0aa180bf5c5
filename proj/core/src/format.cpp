#include "mobind/format.hpp"

#include <cmath>
#include <cstdio>

namespace mobind {

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  int n = std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  std::string text(buffer, n > 0 ? static_cast<std::size_t>(n) : 0);
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) {
    text.erase(0, 1);
  }
  return text;
}

}  // namespace mobind
