#include "gsi/rough_wall.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace gsi;

const PeriodicWallPotential rough(FlatWallPotential::canonical(), 1.0, 0.8, 0.1);
const CollisionKernelModel half = CollisionKernelModel::constant(0.5);

void trace(benchmark::State& state) {
    std::uint64_t i = 0;
    for (auto _ : state) {
        const EntryState e = flux_entry(i++, 4.0);
        benchmark::DoNotOptimize(trace_particle(rough, half, e.y, e.v, {}));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(trace);

void rough_kernels(benchmark::State& state) {
    const VelocityGrid g = VelocityGrid::half_space(8, 8, 4.0, 4.0);
    RoughKernelOptions o;
    o.samples_per_cell = static_cast<int>(state.range(0));
    o.normal_cutoff = g.normal().nodes.front();
    for (auto _ : state) benchmark::DoNotOptimize(build_rough_kernels(rough, half, g, o));
    state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(g.size()));
}
BENCHMARK(rough_kernels)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

} // namespace
