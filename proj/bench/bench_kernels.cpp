// Serial vs OpenMP versions of the three parallel kernels.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "inverterlab/analysis.hpp"
#include "inverterlab/fuzzy.hpp"
#include "inverterlab/sim.hpp"

using namespace inverterlab;

namespace {

std::vector<double> waveform(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ph = 2.0 * std::numbers::pi * 4.0 * double(k) / double(n);
        x[k] = 325.0 * std::sin(ph) + 10.0 * std::sin(3.0 * ph) + 3.0 * std::sin(7.0 * ph);
    }
    return x;
}

void BM_dft_serial(benchmark::State& st) {
    const auto x = waveform(static_cast<std::size_t>(st.range(0)));
    const double fs = 50.0 * double(x.size()) / 4.0;
    for (auto _ : st) benchmark::DoNotOptimize(analysis::serial::dft_harmonics(x, fs, 50.0, 50));
}

void BM_dft_parallel(benchmark::State& st) {
    const auto x = waveform(static_cast<std::size_t>(st.range(0)));
    const double fs = 50.0 * double(x.size()) / 4.0;
    for (auto _ : st) benchmark::DoNotOptimize(analysis::dft_harmonics(x, fs, 50.0, 50));
}

std::vector<double> axis(int n, double span) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = span * (-1.0 + 2.0 * i / (n - 1));
    return v;
}

void BM_surface_serial(benchmark::State& st) {
    const fuzzy::FuzzyConfig cfg;
    const auto table = fuzzy::RuleTable::standard();
    const auto n = static_cast<int>(st.range(0));
    const auto e = axis(n, 1.0 / cfg.ke), de = axis(n, 1.0 / cfg.kde);
    for (auto _ : st) benchmark::DoNotOptimize(fuzzy::serial::control_surface(e, de, cfg, table));
}

void BM_surface_parallel(benchmark::State& st) {
    const fuzzy::FuzzyConfig cfg;
    const auto table = fuzzy::RuleTable::standard();
    const auto n = static_cast<int>(st.range(0));
    const auto e = axis(n, 1.0 / cfg.ke), de = axis(n, 1.0 / cfg.kde);
    for (auto _ : st) benchmark::DoNotOptimize(fuzzy::control_surface(e, de, cfg, table));
}

std::vector<sim::SimConfig> batch() {
    std::vector<sim::SimConfig> out;
    for (auto c : {sim::ControllerKind::backstepping, sim::ControllerKind::sliding, sim::ControllerKind::fuzzy})
        for (double r : {25.0, 50.0}) {
            sim::SimConfig cfg;
            cfg.controller = c;
            cfg.duration = 0.04;
            cfg.load = plant::LoadModel::constant(r);
            out.push_back(cfg);
        }
    return out;
}

void BM_batch_serial(benchmark::State& st) {
    const auto cfgs = batch();
    for (auto _ : st) benchmark::DoNotOptimize(sim::serial::run_batch(cfgs));
}

void BM_batch_parallel(benchmark::State& st) {
    const auto cfgs = batch();
    for (auto _ : st) benchmark::DoNotOptimize(sim::run_batch(cfgs));
}

}  // namespace

BENCHMARK(BM_dft_serial)->Arg(4000)->Arg(40000);
BENCHMARK(BM_dft_parallel)->Arg(4000)->Arg(40000);
BENCHMARK(BM_surface_serial)->Arg(41)->Arg(101);
BENCHMARK(BM_surface_parallel)->Arg(41)->Arg(101);
BENCHMARK(BM_batch_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
