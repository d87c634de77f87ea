#include "acar/fit.hpp"
#include "acar/portmanteau.hpp"
#include "acar/simulate.hpp"

#include <benchmark/benchmark.h>

namespace {

acar::SimulatedSample sample(acar::Index n) {
    acar::SimConfig config;
    config.theta = acar::table1_theta(1);
    config.n = n;
    config.seed = 42;
    return acar::simulate(config);
}

void BM_NegLogLikGradient(benchmark::State& state) {
    const auto s = sample(state.range(0));
    const auto theta = acar::table1_theta(1);
    const acar::Vector eta0 = acar::default_eta0(3);
    acar::Vector grad;
    for (auto _ : state) {
        benchmark::DoNotOptimize(acar::negative_log_likelihood(theta, s.series, s.covariates, eta0, grad));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NegLogLikGradient)->Arg(100)->Arg(500)->Arg(2000);

void BM_LatentGradients(benchmark::State& state) {
    const auto s = sample(state.range(0));
    const auto theta = acar::table1_theta(1);
    for (auto _ : state) {
        auto path = acar::compute_latent_path(theta, s.series, s.covariates, acar::default_eta0(3));
        acar::latent_gradients(theta, s.series, s.covariates, path);
        benchmark::DoNotOptimize(path.grad.data());
    }
}
BENCHMARK(BM_LatentGradients)->Arg(500);

void BM_Simulate(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sample(state.range(0)).series.size());
}
BENCHMARK(BM_Simulate)->Arg(500);

void BM_FitSingleStart(benchmark::State& state) {
    const auto s = sample(state.range(0));
    acar::FitConfig config;
    config.n_starts = 1;
    for (auto _ : state) benchmark::DoNotOptimize(acar::fit(s.series, s.covariates, config).negloglik);
}
BENCHMARK(BM_FitSingleStart)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Portmanteau(benchmark::State& state) {
    const auto s = sample(500);
    const auto f = acar::evaluate_fit(acar::table1_theta(1), s.series, s.covariates);
    for (auto _ : state) benchmark::DoNotOptimize(acar::portmanteau_test(f, static_cast<int>(state.range(0))).statistic);
}
BENCHMARK(BM_Portmanteau)->Arg(1)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
