#include <benchmark/benchmark.h>

#include "proxysel/covariance.hpp"
#include "proxysel/fixtures.hpp"
#include "proxysel/gin.hpp"
#include "proxysel/selection.hpp"

namespace {

proxysel::Dataset make_data(proxysel::PaperCase c, long n) {
    proxysel::LinearScm scm = proxysel::paper_graph(c, 42);
    return proxysel::sample(scm, n, 7);
}

void BM_SampleCovariance(benchmark::State& state) {
    auto data = make_data(proxysel::PaperCase::Gaussian, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(proxysel::sample_covariance(data));
}
BENCHMARK(BM_SampleCovariance)->Arg(1000)->Arg(5000);

void BM_CcaRankTest(benchmark::State& state) {
    auto data = make_data(proxysel::PaperCase::Gaussian, 5000);
    auto sigma = proxysel::sample_covariance(data);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            proxysel::cca_rank_test(sigma, data.n(), {1, 2, 0}, {1, 6, 5}, 2, 0.05));
}
BENCHMARK(BM_CcaRankTest);

void BM_HsicPvalue(benchmark::State& state) {
    auto data = make_data(proxysel::PaperCase::NonGaussian, state.range(0));
    Eigen::VectorXd u = data.values.col(0);
    Eigen::MatrixXd z = data.values.middleCols(1, 2);
    for (auto _ : state) benchmark::DoNotOptimize(proxysel::hsic_pvalue(u, z));
}
BENCHMARK(BM_HsicPvalue)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_ProxyRank(benchmark::State& state) {
    auto data = make_data(proxysel::PaperCase::Gaussian, 5000);
    for (auto _ : state) benchmark::DoNotOptimize(proxysel::proxy_rank(data, 1, 0.05));
}
BENCHMARK(BM_ProxyRank)->Unit(benchmark::kMillisecond);

void BM_ProxyGin(benchmark::State& state) {
    auto data = make_data(proxysel::PaperCase::NonGaussian, 3000);
    for (auto _ : state) benchmark::DoNotOptimize(proxysel::proxy_gin(data, 1, 0.05));
}
BENCHMARK(BM_ProxyGin)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
