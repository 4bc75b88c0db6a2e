// Serial reference vs OpenMP kernels for the two embarrassingly parallel loops.
#include "walras/corpus.hpp"
#include "walras/equilibrium.hpp"
#include "walras/transfer.hpp"

#include <benchmark/benchmark.h>

using namespace walras;

namespace {

// a four-good economy makes the multi-start grid the largest (7^3 seeds)
Scenario four_goods() {
    for (std::uint64_t seed = 0;; ++seed) {
        Scenario s = random_scenario(0xBE4C0000ULL + seed);
        if (s.economy.goods() == 4) return s;
    }
}

const Scenario& scan_case() {
    static const Scenario s = four_goods();
    return s;
}

struct TransferCase {
    Scenario scenario = make_e2();
    Price p_star = find_all_equilibria(scenario.economy, scenario.endowments)[1].p;
};

const TransferCase& transfer_case() {
    static const TransferCase c;
    return c;
}

void BM_scan_serial(benchmark::State& state) {
    const Scenario& s = scan_case();
    for (auto _ : state) benchmark::DoNotOptimize(find_all_equilibria_serial(s.economy, s.endowments));
}

void BM_scan_openmp(benchmark::State& state) {
    const Scenario& s = scan_case();
    for (auto _ : state) benchmark::DoNotOptimize(find_all_equilibria(s.economy, s.endowments));
}

void BM_transfer_serial(benchmark::State& state) {
    const TransferCase& c = transfer_case();
    const int trials = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            detect_transfer_problem_serial(c.scenario.economy, c.scenario.endowments, c.p_star, trials, 1e-3, 1));
    }
}

void BM_transfer_openmp(benchmark::State& state) {
    const TransferCase& c = transfer_case();
    const int trials = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            detect_transfer_problem(c.scenario.economy, c.scenario.endowments, c.p_star, trials, 1e-3, 1));
    }
}

}  // namespace

BENCHMARK(BM_scan_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_scan_openmp)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_transfer_serial)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_transfer_openmp)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
