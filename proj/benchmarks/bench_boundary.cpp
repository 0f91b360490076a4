#include "gsi/flat_bc.hpp"
#include "gsi/lksl.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace gsi;

const FlatWallPotential canonical = FlatWallPotential::canonical();
const CollisionKernelModel half = CollisionKernelModel::constant(0.5);

VelocityGrid square(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    return VelocityGrid::half_space(n, n, 5.0, 5.0);
}

void accommodation(benchmark::State& state) {
    const VelocityGrid g = square(state);
    for (auto _ : state) benchmark::DoNotOptimize(accommodation_table(half, canonical, g, {}));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(accommodation)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void maxwell_like_kernel(benchmark::State& state) {
    const VelocityGrid g = square(state);
    const FlatBoundary b = FlatBoundary::maxwell_like(half, canonical, g, {});
    for (auto _ : state) benchmark::DoNotOptimize(verify_kernel_axioms(b.kernel()));
}
BENCHMARK(maxwell_like_kernel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void lksl_solve(benchmark::State& state) {
    const VelocityGrid g = square(state);
    const LkslSolver solver(half, canonical, g);
    std::vector<double> f(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) f[c] = maxwellian_M(g.incoming(c)) * (1.0 + 0.1 * g.incoming(c).x);
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(f));
}
BENCHMARK(lksl_solve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void closed_form(benchmark::State& state) {
    const VelocityGrid g = square(state);
    const auto m = maxwellian_on(g);
    for (auto _ : state) benchmark::DoNotOptimize(phi01_closed_form(m, std::nullopt, half, canonical, g));
}
BENCHMARK(closed_form)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

} // namespace
