#pragma once

#include <string>

namespace mobind {

// Fixed-point decimal rendering used by every numeric export. Negative zero
// is printed as zero so byte comparisons stay stable.
std::string format_fixed(double value, int decimals);

}  // namespace mobind
