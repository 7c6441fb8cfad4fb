#pragma once

#include <vector>

namespace samg {

// Odometer step over mixed-radix digits, last digit fastest. Returns false
// once the counter wraps back to all zeros.
inline bool odometer_next(std::vector<int>& digits, const std::vector<int>& radix) {
  for (int k = static_cast<int>(digits.size()) - 1; k >= 0; --k) {
    if (++digits[k] < radix[k]) return true;
    digits[k] = 0;
  }
  return false;
}

// Product of radices as a double so callers can compare against a size guard
// without worrying about integer overflow.
inline double radix_product(const std::vector<int>& radix) {
  double p = 1.0;
  for (int r : radix) p *= static_cast<double>(r);
  return p;
}

}  // namespace samg
