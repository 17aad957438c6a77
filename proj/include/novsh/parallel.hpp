#pragma once

#include <cstddef>
#include <functional>

namespace novsh {

/// Worker-thread count for grid loops. 0 selects the hardware default.
void set_worker_threads(int n);
int worker_threads();

/// Runs fn(begin, end) over a contiguous partition of [0, n).
/// Writers must target disjoint, index-derived slots; combined with
/// integer (or order-insensitive) reductions this keeps every result
/// bit-identical across thread counts.
void parallel_for(size_t n, const std::function<void(size_t, size_t)>& fn);

/// Pairwise summation; deterministic for a fixed input order and
/// accurate to O(log n) rounding.
double pairwise_sum(const double* data, size_t n);

}  // namespace novsh
