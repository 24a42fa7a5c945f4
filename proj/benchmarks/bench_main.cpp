#include "fibcon/fiber_lab.hpp"
#include "fibcon/lattice_models.hpp"
#include "fibcon/mesh_fixtures.hpp"
#include "fibcon/singularity.hpp"
#include "fibcon/surface_morse.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace fibcon;

void BM_DefiningPolynomial(benchmark::State& state)
{
    const auto data =
        lattice::parse_isotropy("h: 3\nweights: [[1,-1,0,0],[0,1,-1,0],[0,0,1,-2]]\ntorsion: [[1/3,0,2/3,0]]\n");
    for (auto _ : state)
        benchmark::DoNotOptimize(lattice::compute_defining_polynomial(data));
}
BENCHMARK(BM_DefiningPolynomial);

void BM_MomentZeroSample(benchmark::State& state)
{
    const lattice::DefiningPolynomial dp{{3, 1, 2}, 6, true};
    for (auto _ : state)
        benchmark::DoNotOptimize(lattice::moment_zero_sample(dp, 1000, 1));
}
BENCHMARK(BM_MomentZeroSample);

void BM_ClassifyFocusFocus(benchmark::State& state)
{
    using namespace singularity;
    const HamiltonianSpan span({QuadraticForm::focus_focus_phi(2, 0, 1), QuadraticForm::focus_focus_g(2, 0, 1)});
    for (auto _ : state)
        benchmark::DoNotOptimize(classify_block_signature(span));
}
BENCHMARK(BM_ClassifyFocusFocus);

void BM_PlCriticalPoints(benchmark::State& state)
{
    const auto m = morse::validate_mesh(morse::fixtures::cos_cos_torus(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(morse::pl_critical_points(m));
}
BENCHMARK(BM_PlCriticalPoints)->Arg(32)->Arg(64)->Arg(128);

void BM_ReebGraph(benchmark::State& state)
{
    const auto m = morse::validate_mesh(morse::fixtures::cos_cos_torus(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(morse::reeb_graph(m));
}
BENCHMARK(BM_ReebGraph)->Arg(32)->Arg(64)->Arg(128);

void BM_SampleFiber2D(benchmark::State& state)
{
    const auto spec = fiber::builtin_system("double_bump");
    fiber::SampleOptions o;
    o.resolution = static_cast<std::size_t>(state.range(0));
    o.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(fiber::sample_fiber(spec, {}, 0.9, o));
}
BENCHMARK(BM_SampleFiber2D)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SampleFiber4D(benchmark::State& state)
{
    const auto spec = fiber::builtin_system("ff_model");
    fiber::SampleOptions o;
    o.resolution = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(fiber::sample_fiber(spec, {0.0}, 0.0, o));
}
BENCHMARK(BM_SampleFiber4D)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_DetectTorus(benchmark::State& state)
{
    const auto spec = fiber::builtin_system("torus_cos");
    for (auto _ : state)
        benchmark::DoNotOptimize(fiber::detect_critical_mod_phi(spec));
}
BENCHMARK(BM_DetectTorus)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
