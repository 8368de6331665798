#include <benchmark/benchmark.h>

#include "nlmsa/covariance.hpp"
#include "nlmsa/eig_moments.hpp"
#include "nlmsa/mc_oracle.hpp"
#include "nlmsa/moment_matrices.hpp"
#include "nlmsa/predictor.hpp"
#include "nlmsa/simulator.hpp"
#include "nlmsa/specfun.hpp"

namespace {

using namespace nlmsa;

std::vector<double> ladder(int m) {
    std::vector<double> v(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) v[static_cast<size_t>(i)] = 1.0 + 0.7 * i;
    return v;
}

void bm_derived_moments(benchmark::State& state) {
    const Spectrum s(ladder(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        MomentSet ms = derived_moments(s);
        benchmark::DoNotOptimize(ms.second_r);
    }
}
BENCHMARK(bm_derived_moments)->Arg(5)->Arg(8)->Arg(16);

void bm_hermitian_eig(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const CMatrix r = InputCovariance::toeplitz(m, 0.5).matrix();
    for (auto _ : state) {
        HermitianEig e = hermitian_eig(r);
        benchmark::DoNotOptimize(e.values[0]);
    }
}
BENCHMARK(bm_hermitian_eig)->Arg(5)->Arg(16)->Arg(32);

void bm_nlms_run(benchmark::State& state) {
    const InputCovariance cov = InputCovariance::toeplitz(5, 0.5);
    const FilterScenario sc({0.227, 0.46, 0.688, 0.46, 0.227}, 0.1, 0.01, cov);
    const int iters = static_cast<int>(state.range(0));
    Rng rng(7);
    for (auto _ : state) {
        RunResult r = nlms_run(sc, iters, rng);
        benchmark::DoNotOptimize(r.mse.back());
    }
    state.SetItemsProcessed(state.iterations() * iters);
}
BENCHMARK(bm_nlms_run)->Arg(1000);

void bm_oracle_samples(benchmark::State& state) {
    const Spectrum s({3.0, 2.0, 1.0});
    const auto n = static_cast<std::int64_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        MomentSetEstimate est = estimate_moment_set(s, n, seed++);
        benchmark::DoNotOptimize(est.second_r.value);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_oracle_samples)->Arg(100000);

void bm_gamma_zero(benchmark::State& state) {
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(specfun::upper_incomplete_gamma_zero(x));
        x = x < 30.0 ? x + 0.1 : 0.1;
    }
}
BENCHMARK(bm_gamma_zero);

void bm_gauss_2f1(benchmark::State& state) {
    double z = -0.95;
    for (auto _ : state) {
        benchmark::DoNotOptimize(specfun::gauss_2f1(specfun::hyp_1_2_4, z));
        z = z < 0.9 ? z + 0.05 : -0.95;
    }
}
BENCHMARK(bm_gauss_2f1);

void bm_learning_curve(benchmark::State& state) {
    const InputCovariance cov = InputCovariance::toeplitz(5, 0.5);
    const FilterScenario sc({0.227, 0.46, 0.688, 0.46, 0.227}, 0.1, 0.01, cov);
    for (auto _ : state) {
        LearningCurve lc = learning_curve(sc, 5000, Measure::MSE);
        benchmark::DoNotOptimize(lc.values.back());
    }
}
BENCHMARK(bm_learning_curve);

}  // namespace

BENCHMARK_MAIN();
