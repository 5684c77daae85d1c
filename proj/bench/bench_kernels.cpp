// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <map>

#include "decluster/discrepancy.hpp"
#include "decluster/nets.hpp"
#include "decluster/schemegen.hpp"

using namespace decluster;

namespace {

const coloring::LatinColoring& bench_coloring(std::uint32_t M, std::uint32_t d) {
    static std::map<std::pair<std::uint32_t, std::uint32_t>, coloring::LatinColoring> cache;
    auto it = cache.find({M, d});
    if (it == cache.end()) {
        it = cache.emplace(std::pair{M, d}, schemegen::generate_scheme(M, d, coloring::Mode::paper).coloring).first;
    }
    return it->second;
}

void BM_DiscReportParallel(benchmark::State& state) {
    const auto M = static_cast<std::uint32_t>(state.range(0));
    const auto d = static_cast<std::uint32_t>(state.range(1));
    const auto& c = bench_coloring(M, d);
    for (auto _ : state) benchmark::DoNotOptimize(discrepancy::disc_report(c, M));
}

void BM_DiscReportSerial(benchmark::State& state) {
    const auto M = static_cast<std::uint32_t>(state.range(0));
    const auto d = static_cast<std::uint32_t>(state.range(1));
    const auto& c = bench_coloring(M, d);
    for (auto _ : state) benchmark::DoNotOptimize(discrepancy::disc_report_serial(c, M));
}

void BM_VerifyNetParallel(benchmark::State& state) {
    const auto net = nets::build_net(static_cast<std::uint32_t>(state.range(0)), static_cast<std::uint32_t>(state.range(1)),
                                     static_cast<std::uint32_t>(state.range(2)));
    for (auto _ : state) benchmark::DoNotOptimize(nets::verify_net(net, 0));
}

void BM_VerifyNetSerial(benchmark::State& state) {
    const auto net = nets::build_net(static_cast<std::uint32_t>(state.range(0)), static_cast<std::uint32_t>(state.range(1)),
                                     static_cast<std::uint32_t>(state.range(2)));
    for (auto _ : state) benchmark::DoNotOptimize(nets::verify_net_serial(net, 0));
}

}  // namespace

BENCHMARK(BM_DiscReportParallel)->Args({32, 2})->Args({64, 2})->Args({8, 3})->Args({11, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiscReportSerial)->Args({32, 2})->Args({64, 2})->Args({8, 3})->Args({11, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyNetParallel)->Args({4, 6, 5})->Args({9, 4, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyNetSerial)->Args({4, 6, 5})->Args({9, 4, 10})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
