// Serial reference vs OpenMP kernels. Arg 0 is the serial path, k > 0 caps workers at k.

#include "wzlab/experiments.hpp"
#include "wzlab/integrators.hpp"
#include "wzlab/lyapunov.hpp"
#include "wzlab/models.hpp"

#include <benchmark/benchmark.h>

using namespace wzlab;

namespace {

MonteCarloOptions options(const benchmark::State& state) {
    MonteCarloOptions o;
    o.levels = {2, 4, 6};
    o.samples = 200;
    o.level = 10;
    o.seed = 1;
    o.workers = static_cast<int>(state.range(0));
    o.execution = o.workers == 0 ? Execution::serial : Execution::parallel;
    return o;
}

void BM_WongZakai(benchmark::State& state) {
    const BuiltinModel b = builtin("cubic");
    const CoefficientSystem sys = reduce_to_wz_form(b.model, WzVariant::skeleton);
    const MonteCarloOptions o = options(state);
    for (auto _ : state) benchmark::DoNotOptimize(wong_zakai_convergence(sys, std::nullopt, b.model.x0, 0.25, o));
    state.SetItemsProcessed(state.iterations() * o.samples);
}

void BM_SupportUpper(benchmark::State& state) {
    const BuiltinModel b = builtin("duffing_vdp");
    const MonteCarloOptions o = options(state);
    for (auto _ : state) benchmark::DoNotOptimize(support_upper(b.model, 0.25, o));
    state.SetItemsProcessed(state.iterations() * o.samples);
}

void BM_Audit(benchmark::State& state) {
    const BuiltinModel b = builtin("lotka_volterra3");
    const SamplingDomain dom = parse_domain("logradial", 3);
    AuditOptions o;
    o.samples = 20000;
    o.workers = static_cast<int>(state.range(0));
    o.execution = o.workers == 0 ? Execution::serial : Execution::parallel;
    for (auto _ : state) benchmark::DoNotOptimize(audit(b.model, b.lyapunov, dom, o));
    state.SetItemsProcessed(state.iterations() * o.samples);
}

void BM_EulerPath(benchmark::State& state) {
    const SdeModel m = builtin("sir").model;
    const WienerHandle w = sample_wiener(1, static_cast<int>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_sde(m, w, m.x0));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w->steps()));
}

}  // namespace

BENCHMARK(BM_WongZakai)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SupportUpper)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Audit)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EulerPath)->Arg(10)->Arg(14)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
