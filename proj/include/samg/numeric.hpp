#pragma once

#include <string>
#include <vector>

namespace samg {

// 17 significant digits: enough for a double to survive a text round trip
// bit-exactly. Used by every machine-readable writer.
std::string fmt17(double x);

// 6 decimal places for human-facing tables.
std::string fmt6(double x);

double row_sum(const std::vector<double>& row);

// Divide the row by its sum, then nudge the largest entry until the sum is
// bit-exactly 1.0. Rows that already sum to exactly 1.0 (deterministic 0/1
// rows in particular) are left untouched, which keeps parsing idempotent:
// any row this function has produced reparses without further change.
void normalize_exact(std::vector<double>& row);

}  // namespace samg
