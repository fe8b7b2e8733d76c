#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "scca/bridge.hpp"
#include "scca/kendall.hpp"
#include "scca/mvn.hpp"

namespace {

void BM_bvn_cdf(benchmark::State& state) {
    double r = 0.6, a = 0.3, b = -0.4;
    for (auto _ : state) benchmark::DoNotOptimize(scca::mvn::bvn_cdf(a, b, r));
}
BENCHMARK(BM_bvn_cdf);

void BM_mvn_cdf4(benchmark::State& state) {
    Eigen::Matrix4d s;
    s << 1, .3, -.2, .1,
         .3, 1, .4, -.1,
         -.2, .4, 1, .2,
         .1, -.1, .2, 1;
    scca::mvn::CorrelationMatrix c(s);
    Eigen::Vector4d lim(0.3, -0.2, 0.5, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(scca::mvn::mvn_cdf(lim, c));
}
BENCHMARK(BM_mvn_cdf4);

void BM_bridge_tt(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(scca::bridge::bridge_tt(0.6, 0.2, -0.1));
}
BENCHMARK(BM_bridge_tt);

void BM_invert_tt(benchmark::State& state) {
    double tau = scca::bridge::bridge_tt(0.6, 0.2, -0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            scca::bridge::invert_bridge(tau, scca::bridge::PairKind::TT, 0.2, -0.1));
}
BENCHMARK(BM_invert_tt);

void BM_tau_pair(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<double> x(state.range(0)), y(state.range(0));
    for (std::size_t i = 0; i < x.size(); ++i) { x[i] = U(rng); y[i] = U(rng); }
    for (auto _ : state)
        benchmark::DoNotOptimize(scca::kendall::tau_pair(x, y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_tau_pair)->Range(256, 1 << 16)->Complexity();

}  // namespace

BENCHMARK_MAIN();
