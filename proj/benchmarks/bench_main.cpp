#include <benchmark/benchmark.h>

#include "gmrd/analysis.hpp"
#include "gmrd/fem.hpp"
#include "gmrd/mesh.hpp"
#include "gmrd/simulate.hpp"

using namespace gmrd;

namespace {

KineticsParams bmp4() {
    return {77.76, 77.76, 77.76, 77.76, 3.8, 19.0, 172.8, 172.8, 3.0};
}

void BM_BuildDiskMesh(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_disk_mesh(1.0, h).n_nodes());
}
BENCHMARK(BM_BuildDiskMesh)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AssembleOperators(benchmark::State& state) {
    const Mesh mesh = build_disk_mesh(1.0, 1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(mesh));
    state.counters["nodes"] = static_cast<double>(mesh.n_nodes());
}
BENCHMARK(BM_AssembleOperators)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ImexStep(benchmark::State& state) {
    auto mesh = std::make_shared<const Mesh>(build_disk_mesh(1.0, 1.0 / static_cast<double>(state.range(0))));
    SimState s = init_state(mesh, bmp4(), 3.0, 0.0, BoundaryMode::robin());
    const auto solver = state.range(1) == 0 ? LinearSolverKind::cholesky : LinearSolverKind::cg;
    ImexStepper stepper(s, 1e-4, solver);
    for (auto _ : state) stepper.step(s);
    state.SetLabel(to_string(solver));
}
BENCHMARK(BM_ImexStep)->Args({50, 0})->Args({50, 1})->Args({100, 0})->Unit(benchmark::kMicrosecond);

void BM_ExplicitStep(benchmark::State& state) {
    auto mesh = std::make_shared<const Mesh>(build_disk_mesh(1.0, 0.02));
    SimState s = init_state(mesh, bmp4(), 3.0, 0.0, BoundaryMode::robin());
    const double dt = 0.5 * explicit_stable_dt(s);
    for (auto _ : state) step_explicit(s, dt);
}
BENCHMARK(BM_ExplicitStep)->Unit(benchmark::kMicrosecond);

void BM_Poincare(benchmark::State& state) {
    const Mesh mesh = build_disk_mesh(1.0, 0.04);
    for (auto _ : state) benchmark::DoNotOptimize(poincare_constant(mesh).lambda1);
}
BENCHMARK(BM_Poincare)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
