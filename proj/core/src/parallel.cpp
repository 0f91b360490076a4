#include "gsi/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/info.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <algorithm>

namespace gsi {

void parallel_for(std::size_t n, Parallelism parallelism, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    // more workers than cores buys nothing and makes TBB complain
    const int cores = tbb::info::default_concurrency();
    const int workers = parallelism.threads > 0 ? std::min(parallelism.threads, cores) : cores;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    tbb::task_arena arena(workers);
    arena.execute([&] {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
            for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
        });
    });
}

} // namespace gsi
