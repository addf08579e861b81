#pragma once

#include <functional>

namespace lumisep {

/// Worker count from LUMISEP_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs fn(begin, end) over disjoint row ranges covering [0, rows).
/// Each row range is processed by exactly one worker, so per-pixel stages
/// produce identical results regardless of the worker count.
void parallel_rows(int rows, const std::function<void(int, int)>& fn);

}  // namespace lumisep
