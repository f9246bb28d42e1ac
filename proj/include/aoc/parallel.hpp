#pragma once

#include <functional>

namespace aoc {

// Worker cap: AOC_THREADS when set, hardware concurrency otherwise.
int worker_threads();

// Runs fn(0..n-1), splitting across workers when more than one is available.
// Results must be written to disjoint slots; scheduling never affects output.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace aoc
