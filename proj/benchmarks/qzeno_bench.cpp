#include "qzeno/channels.hpp"
#include "qzeno/collapse.hpp"
#include "qzeno/zeno.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace qzeno;

namespace {

ZenoProtocol rabi(std::size_t n) {
    return ZenoProtocol{.total_time = 1.0,
                        .event_count = n,
                        .hamiltonian = HamiltonianSpec::rabi(std::numbers::pi),
                        .projector = Projector::onto_basis(2, {0}, "E"),
                        .initial_state = WeightOperator::basis_state(2, 0)};
}

} // namespace

static void BM_ExpectedRabi(benchmark::State& st) {
    const auto p = rabi(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(run_expected(p).point.survival);
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_ExpectedRabi)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_ExpectedRandom(benchmark::State& st) {
    const auto dim = static_cast<std::size_t>(st.range(0));
    ZenoProtocol p = rabi(200);
    p.hamiltonian = HamiltonianSpec::random(1, dim);
    p.projector = Projector::onto_basis(dim, {0}, "E");
    p.initial_state = WeightOperator::basis_state(dim, 0);
    p.dephasing = DephasingChannel::computational(dim, 5.0);
    for (auto _ : st) benchmark::DoNotOptimize(run_expected(p).point.survival);
}
BENCHMARK(BM_ExpectedRandom)->Arg(4)->Arg(16)->Arg(64);

static void BM_Sampled(benchmark::State& st) {
    auto p = rabi(100);
    p.mode = RunMode::Sampled;
    p.trajectories = static_cast<std::size_t>(st.range(0));
    p.root_seed = 1;
    for (auto _ : st) benchmark::DoNotOptimize(run_sampled(p).point.survival);
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Sampled)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_BranchMixture(benchmark::State& st) {
    const BranchConfig cfg{.terminal_count = static_cast<std::size_t>(st.range(0)), .release_probability = 0.3};
    for (auto _ : st) benchmark::DoNotOptimize(release_branch_mixture(cfg).trace());
}
BENCHMARK(BM_BranchMixture)->Arg(8)->Arg(16)->Arg(20);

static void BM_Process1(benchmark::State& st) {
    const auto dim = static_cast<std::size_t>(st.range(0));
    const auto s = WeightOperator(identity(dim) / static_cast<double>(dim));
    const auto p = Projector::onto_basis(dim, {0, 1}, "E");
    for (auto _ : st) benchmark::DoNotOptimize(process1(s, p).trace());
}
BENCHMARK(BM_Process1)->Arg(4)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
