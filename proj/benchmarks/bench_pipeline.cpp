#include <benchmark/benchmark.h>

#include <sstream>

#include "qdtherm/cli/commands.hpp"
#include "qdtherm/cli/config.hpp"
#include "qdtherm/ensemble.hpp"
#include "qdtherm/estimator.hpp"
#include "qdtherm/fermi2d.hpp"
#include "qdtherm/io.hpp"
#include "qdtherm/rts_sim.hpp"

namespace {

using namespace qdtherm;

rts::RateModel default_rates() {
    const auto config = cli::RunConfig::defaults();
    return rts::dwell_means_from_ratio(ensemble::occupation_ratio(config.params()).value(),
                                       config.attempt_rate);
}

void BM_SimulateEvents(benchmark::State& state) {
    const auto rates = default_rates();
    for (auto _ : state) {
        benchmark::DoNotOptimize(rts::simulate_events(rates, std::size_t(state.range(0)), 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateEvents)->Arg(10000)->Arg(100000);

void BM_RenderTrace(benchmark::State& state) {
    const auto config = cli::RunConfig::defaults();
    const auto events = rts::simulate_events(default_rates(), 10000, 1);
    for (auto _ : state) benchmark::DoNotOptimize(rts::render_trace(events, config.trace));
}
BENCHMARK(BM_RenderTrace)->Unit(benchmark::kMillisecond);

void BM_DetectStates(benchmark::State& state) {
    const auto config = cli::RunConfig::defaults();
    const auto trace = rts::render_trace(rts::simulate_events(default_rates(), 10000, 1),
                                         config.trace);
    const auto det = config.detection_for(config.trace);
    for (auto _ : state) benchmark::DoNotOptimize(estimator::detect_states(trace, det));
    state.SetItemsProcessed(state.iterations() * std::int64_t(trace.samples.size()));
}
BENCHMARK(BM_DetectStates)->Unit(benchmark::kMillisecond);

void BM_WriteTraceCsv(benchmark::State& state) {
    const auto config = cli::RunConfig::defaults();
    const auto trace = rts::render_trace(rts::simulate_events(default_rates(), 1000, 1),
                                         config.trace);
    for (auto _ : state) {
        std::ostringstream os;
        io::write_trace_csv(os, trace);
        benchmark::DoNotOptimize(os.str().size());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(trace.samples.size()));
}
BENCHMARK(BM_WriteTraceCsv)->Unit(benchmark::kMillisecond);

void BM_RoundTrip(benchmark::State& state) {
    const auto config = cli::RunConfig::defaults();
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(cli::roundtrip_once(config, seed++));
}
BENCHMARK(BM_RoundTrip)->Unit(benchmark::kMillisecond);

void BM_FdOracle(benchmark::State& state) {
    const double g = fermi2d::dos_2d({});
    for (auto _ : state) benchmark::DoNotOptimize(fermi2d::fd_oracle(100, 1e4, g, 4.2));
}
BENCHMARK(BM_FdOracle);

void BM_OccupationProbability(benchmark::State& state) {
    const auto p = cli::RunConfig::defaults().params();
    for (auto _ : state) benchmark::DoNotOptimize(ensemble::occupation_probability(p));
}
BENCHMARK(BM_OccupationProbability);

}  // namespace

BENCHMARK_MAIN();
