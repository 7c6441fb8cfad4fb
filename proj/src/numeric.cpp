#include "samg/numeric.hpp"

#include <cmath>
#include <cstdio>

namespace samg {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

double row_sum(const std::vector<double>& row) {
  double s = 0.0;
  for (double x : row) s += x;
  return s;
}

void normalize_exact(std::vector<double>& row) {
  if (row.empty()) return;
  double s = row_sum(row);
  if (s != 1.0 && s > 0.0) {
    for (double& x : row) x /= s;
  }
  double err = row_sum(row) - 1.0;
  if (err == 0.0) return;
  // The division can leave the sum a few ulps away from 1. Walk the largest
  // entry one ulp at a time toward the target: the step is at most half the
  // width of the set of entries that sum to exactly 1, so it cannot be
  // skipped over the way a single bulk correction can.
  std::size_t top = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[top]) top = i;
  }
  for (int guard = 0; guard < 256 && err != 0.0; ++guard) {
    row[top] = std::nextafter(row[top], err > 0.0 ? 0.0 : 2.0);
    err = row_sum(row) - 1.0;
  }
}

}  // namespace samg
