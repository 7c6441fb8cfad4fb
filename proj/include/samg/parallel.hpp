#pragma once

#include <functional>

namespace samg {

// Worker cap: SAMG_THREADS when set to a positive integer, otherwise the
// available hardware parallelism.
int worker_count();

// Runs body(i) for every i in [0, n). body must only write state owned by
// index i; under that contract the outcome is bitwise independent of both
// scheduling and the worker count.
void parallel_for(long n, const std::function<void(long)>& body);

}  // namespace samg
