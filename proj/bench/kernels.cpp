// Serial vs OpenMP kernels: the PrpReBa row update and the POP brute force.

#include "padopt/dataset.hpp"
#include "padopt/prp.hpp"
#include "padopt/verification.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <vector>

namespace {

using namespace padopt;

std::shared_ptr<const PaddingProblem> synthetic(std::size_t n, double c) {
    SyntheticSpec spec;
    spec.n = n;
    spec.size_max = 1'000'000'000;
    spec.seed = 1;
    return std::make_shared<const PaddingProblem>(problem_from_multiplier(generate_synthetic(spec), c));
}

const JointMatrix& prp_input(std::size_t n) {
    static std::map<std::size_t, JointMatrix> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, solve_prp_renyi(synthetic(n, 1.1))).first;
    return it->second;
}

// 8 files of distinct sizes with wide windows: 8! feasible schemes.
const PaddingProblem& pop_input() {
    static const auto pb = [] {
        std::vector<FileRecord> records;
        for (int i = 0; i < 8; ++i) records.push_back({100 + i, 1.0 + 0.37 * ((i * 5) % 8)});
        return problem_from_multiplier(FileSet::from_records(std::move(records)), 2.0);
    }();
    return pb;
}

void BM_ReduceBandwidthSerial(benchmark::State& state) {
    const auto& joint = prp_input(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reduce_bandwidth_serial(joint));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReduceBandwidthOpenMP(benchmark::State& state) {
    const auto& joint = prp_input(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reduce_bandwidth(joint));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BruteForcePopSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_pop_serial(pop_input()));
}

void BM_BruteForcePopOpenMP(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_pop(pop_input()));
}

} // namespace

BENCHMARK(BM_ReduceBandwidthSerial)->Arg(10000)->Arg(423450)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ReduceBandwidthOpenMP)->Arg(10000)->Arg(423450)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BruteForcePopSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BruteForcePopOpenMP)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
