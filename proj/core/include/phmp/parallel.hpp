#pragma once

#include <cstddef>
#include <functional>

namespace phmp {

// worker count used by the grid loops; 0 or negative means hardware concurrency
void set_jobs(int n);
int jobs();

// runs body(i) for i in [0, n); callers write results into per-index slots so the
// outcome does not depend on scheduling
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace phmp
