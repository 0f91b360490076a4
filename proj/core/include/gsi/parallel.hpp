#pragma once

#include <cstddef>
#include <functional>

namespace gsi {

/// Worker count for the parallel loops of the library; 0 selects the machine default.
struct Parallelism {
    int threads = 0;
};

/// Runs body(i) for i in [0, n). Bodies must only write state owned by index i, so that
/// results do not depend on the worker count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, Parallelism parallelism, const std::function<void(std::size_t)>& body);

} // namespace gsi
