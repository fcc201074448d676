#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace volcrit {

/// Worker threads used by quadrature maps. Defaults to 1.
void set_thread_count(int threads);
int thread_count();

/// Runs fn(i) for i in [0, count) on thread_count() workers. Each index is
/// visited exactly once; fn must only write to per-index storage.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Pairwise sum in index order; the result does not depend on how the terms
/// were produced.
double ordered_sum(std::span<const double> terms);

}  // namespace volcrit
