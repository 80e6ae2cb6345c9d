#pragma once

#include <cstddef>
#include <functional>

namespace cbf_surrogate {

// Worker count used when a caller passes jobs = 0: CBF_SURROGATE_JOBS if set
// to a positive integer, else std::thread::hardware_concurrency().
std::size_t default_jobs();

// Runs body(i) for i in [0, count) on up to `jobs` threads. Callers write
// results into slot i so the outcome never depends on scheduling. The first
// exception thrown by any task (lowest index wins) is rethrown after all
// workers join.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& body);

}  // namespace cbf_surrogate
