#pragma once

#include <functional>

namespace huefuse {

/// Worker count used by image-level loops. Defaults to HUEFUSE_THREADS when
/// set, otherwise hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs fn(y0, y1) over disjoint row ranges covering [0, rows). Each row is
/// processed by exactly one call, so per-pixel results never depend on the
/// partitioning.
void parallel_rows(int rows, const std::function<void(int, int)>& fn);

}  // namespace huefuse
