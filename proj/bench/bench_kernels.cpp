// Serial reference vs OpenMP kernels. Arg 1 = serial, 0 = all cores.

#include <benchmark/benchmark.h>

#include "riskfloor/erm_pwc.hpp"
#include "riskfloor/hardness.hpp"
#include "riskfloor/simlab.hpp"

namespace rf = riskfloor;

namespace {

rf::ExecPolicy policy_of(const benchmark::State& st) {
    return st.range(0) == 1 ? rf::ExecPolicy::serial() : rf::ExecPolicy::parallel(0);
}

void BM_coverage_pwc_refined(benchmark::State& st) {
    const auto gen = rf::Generator::pwc_signal(1, 4, 1.0);
    rf::BoundRequest req;
    req.method = rf::Method::pwc_refined;
    req.budget = rf::AlphaBudget::even(0.05);
    for (auto _ : st) {
        auto c = rf::coverage_experiment(gen, rf::ModelClassSpec::pwc(4), req, 200, {1000, 1, policy_of(st)});
        benchmark::DoNotOptimize(c.miscoverage_count);
    }
}
BENCHMARK(BM_coverage_pwc_refined)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_coverage_linear_trunc(benchmark::State& st) {
    const auto gen = rf::Generator::linear_gaussian(3, 1.0);
    rf::BoundRequest req;
    req.method = rf::Method::erm_trunc;
    req.budget = rf::AlphaBudget::even(0.05);
    req.B = 10.0;
    for (auto _ : st) {
        auto c = rf::coverage_experiment(gen, rf::ModelClassSpec::linear(3), req, 200, {1000, 2, policy_of(st)});
        benchmark::DoNotOptimize(c.miscoverage_count);
    }
}
BENCHMARK(BM_coverage_linear_trunc)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_lambda_mc(benchmark::State& st) {
    const auto gen = rf::Generator::linear_gaussian(100, 1.0);
    const Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(100, 100);
    for (auto _ : st) {
        auto est = rf::lambda_general_mc(rf::feature_sampler(gen), 10, 100, omega, 2000, 3, policy_of(st));
        benchmark::DoNotOptimize(est.value);
    }
}
BENCHMARK(BM_lambda_mc)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_occupancy(benchmark::State& st) {
    for (auto _ : st) {
        auto o = rf::occupancy_experiment(365, 23, 0.05, {200000, 4, policy_of(st)});
        benchmark::DoNotOptimize(o.all_distinct.count);
    }
}
BENCHMARK(BM_occupancy)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

// The DP itself is single-threaded; listed for scale.
void BM_kmeans_dp(benchmark::State& st) {
    const auto L = static_cast<std::size_t>(st.range(0));
    rf::Rng rng(5);
    rf::WeightedInstance inst(L);
    for (auto& p : inst) p.value = rng.normal();
    for (auto _ : st) benchmark::DoNotOptimize(rf::kmeans1d_exact(inst, static_cast<int>(L / 2)).cost);
}
BENCHMARK(BM_kmeans_dp)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
