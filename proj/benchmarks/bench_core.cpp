#include "uhlq/gdqpt.hpp"
#include "uhlq/quench.hpp"
#include "uhlq/spin_half.hpp"
#include "uhlq/uhlmann.hpp"

#include <benchmark/benchmark.h>

#include <Eigen/QR>

#include <numbers>
#include <random>

using namespace uhlq;

namespace {

Matrix bench_hermitian(Eigen::Index dim)
{
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> nd;
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(nd(rng), nd(rng));
    return 0.5 * (a + Matrix(a.adjoint()));
}

QuenchScenario bench_scenario(Eigen::Index dim)
{
    return QuenchScenario(HermitianMatrix(bench_hermitian(dim)),
                          HermitianMatrix(0.7 * bench_hermitian(dim)), 1.2);
}

} // namespace

static void BM_HermitianEig(benchmark::State& state)
{
    const HermitianMatrix h(bench_hermitian(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(h));
}
BENCHMARK(BM_HermitianEig)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_PsdSqrt(benchmark::State& state)
{
    const QuenchScenario s = bench_scenario(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(psd_sqrt(s.rho0()));
}
BENCHMARK(BM_PsdSqrt)->Arg(2)->Arg(8);

static void BM_QuenchConnectionSample(benchmark::State& state)
{
    const QuenchScenario s = bench_scenario(state.range(0));
    double t = 0.0;
    for (auto _ : state) {
        t += 0.001;
        benchmark::DoNotOptimize(s.connection()(t));
    }
}
BENCHMARK(BM_QuenchConnectionSample)->Arg(2)->Arg(4)->Arg(8);

static void BM_HolonomyStep(benchmark::State& state)
{
    const QuenchScenario s = bench_scenario(state.range(0));
    const ConnectionSampler sampler = [&](double t) { return s.connection()(t); };
    const IntegratorScheme scheme =
        state.range(1) == 0 ? IntegratorScheme::midpoint : IntegratorScheme::magnus4;
    Matrix g = Matrix::Identity(state.range(0), state.range(0));
    double t = 0.0;
    const double dt = 1e-3;
    for (auto _ : state) {
        g = holonomy_step(sampler, t, t + dt, g, scheme);
        t += dt;
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_HolonomyStep)->Args({2, 0})->Args({2, 1})->Args({4, 0})->Args({4, 1})->Args({8, 1});

static void BM_TrajectoryPoint(benchmark::State& state)
{
    const SpinHalfParams p(1.0, 1.0, std::numbers::pi / 3.0, 0.4);
    const TrajectoryEvaluator eval(make_scenario(p));
    eval.holonomy(20.0); // warm the holonomy cache
    double t = 0.0;
    for (auto _ : state) {
        t += 0.0123;
        if (t > 20.0) t = 0.0;
        benchmark::DoNotOptimize(eval(t));
    }
}
BENCHMARK(BM_TrajectoryPoint);

static void BM_LoschmidtAnalytic(benchmark::State& state)
{
    const SpinHalfParams p(1.0, 0.7, 1.1, 0.9);
    double t = 0.0;
    for (auto _ : state) {
        t += 0.0123;
        benchmark::DoNotOptimize(loschmidt_analytic(p, t));
    }
}
BENCHMARK(BM_LoschmidtAnalytic);

static void BM_CriticalTimeScan(benchmark::State& state)
{
    const SpinHalfParams p(1.0, 0.01, 0.5 * std::numbers::pi, 0.0);
    const TrajectoryEvaluator eval(make_scenario(p));
    const TrajectoryFn fn = [&](double t) { return eval(t); };
    const auto samples = scan_trajectory(fn, 20.0, 0.01);
    for (auto _ : state) benchmark::DoNotOptimize(find_critical_times(samples, fn));
}
BENCHMARK(BM_CriticalTimeScan);

BENCHMARK_MAIN();
