#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "remest/densities.hpp"
#include "remest/dp_solver.hpp"
#include "remest/simulator.hpp"
#include "remest/stage_solver.hpp"

using namespace remest;

namespace {

SourceDensity make_tabulated() {
    const int points = 401;
    std::vector<double> grid(points);
    std::vector<double> pdf(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = 5.0 * (2.0 * i - (points - 1)) / (points - 1);
        pdf[i] = std::exp(-0.5 * grid[i] * grid[i]);
    }
    for (int i = 0; i < points / 2; ++i) {
        grid[points - 1 - i] = -grid[i];
        pdf[points - 1 - i] = pdf[i];
    }
    double mass = 0.0;
    for (int i = 0; i + 1 < points; ++i) {
        mass += 0.5 * (pdf[i] + pdf[i + 1]) * (grid[i + 1] - grid[i]);
    }
    for (auto& p : pdf) {
        p /= mass;
    }
    return SourceDensity::tabulated(grid, pdf);
}

void IntervalMomentsLaplace(benchmark::State& state) {
    const auto density = SourceDensity::laplace(1.0);
    double a = 0.3;
    for (auto _ : state) {
        auto m = density.interval_moments(a, a + 2.0);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(IntervalMomentsLaplace);

void IntervalMomentsTabulated(benchmark::State& state) {
    const auto density = make_tabulated();
    for (auto _ : state) {
        auto m = density.interval_moments(0.3, 2.3);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(IntervalMomentsTabulated);

void LaplaceThresholdSolve(benchmark::State& state) {
    for (auto _ : state) {
        auto solution = solve_laplace_thresholds(0.5, 2.0, 1.0, 1.0);
        benchmark::DoNotOptimize(solution);
    }
}
BENCHMARK(LaplaceThresholdSolve);

void GenericThresholdSolve(benchmark::State& state) {
    const auto density = SourceDensity::laplace(1.0);
    for (auto _ : state) {
        auto solution = solve_generic_thresholds(density, 0.5, 2.0, 1.0);
        benchmark::DoNotOptimize(solution);
    }
}
BENCHMARK(GenericThresholdSolve);

void DpSolve(benchmark::State& state) {
    const auto density = SourceDensity::laplace(1.0);
    const int budget = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto table = solve_dp(100, budget, budget / 2, density, 1.0);
        benchmark::DoNotOptimize(table);
    }
    state.SetComplexityN(budget);
}
BENCHMARK(DpSolve)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond)->Complexity();

void Episode(benchmark::State& state) {
    EpisodeConfig config;
    config.horizon = 100;
    config.noisy_budget = 20;
    config.perfect_budget = 10;
    config.density = SourceDensity::laplace(1.0);
    config.snr = 1.0;
    config.noise = NoiseModel{1.0, NoiseShape::gaussian};
    const auto table = solve_dp(100, 20, 10, config.density, config.snr);
    std::uint64_t episode = 0;
    for (auto _ : state) {
        auto path = run_episode(config, table, derive_seed(7, episode++));
        benchmark::DoNotOptimize(path);
    }
}
BENCHMARK(Episode);

} // namespace

BENCHMARK_MAIN();
