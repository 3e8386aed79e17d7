// OpenMP kernels against their serial references.
#include "etcon/graph.hpp"
#include "etcon/linear_et.hpp"
#include "etcon/parallel.hpp"
#include "etcon/rng.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace etcon;

namespace {

LinearEtSystem damped_system(int n) {
    XorShift64Star rng(5);
    LinearEtSystem sys;
    sys.A = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sys.A(i, j) = 0.3 * rng.normal();
    sys.B = Matrix::Identity(n, n);
    sys.K = -sys.A - Matrix::Identity(n, n);
    sys.Q = Matrix::Identity(n, n);
    sys.R = 0.5 * Matrix::Identity(n, n);
    return sys;
}

std::vector<double> grid(int points, double t_max) {
    std::vector<double> t(points);
    for (int k = 0; k < points; ++k) t[k] = t_max * (k + 1) / points;
    return t;
}

std::vector<SimJob> sweep_jobs(int count) {
    XorShift64Star rng(9);
    std::vector<SimJob> jobs;
    for (int k = 0; k < count; ++k) {
        const auto g = random_connected_undirected(6, 100 + k);
        Vector x0(6);
        for (int i = 0; i < 6; ++i) x0(i) = rng.uniform(-1.0, 1.0);
        SimConfig cfg;
        cfg.horizon = 20.0;
        jobs.push_back({g, StateDependent{{0.1 + 0.8 * k / count}}, x0, cfg});
    }
    return jobs;
}

template <bool Parallel>
void BM_GapMatrices(benchmark::State& state) {
    const auto lyap = prepare_lyapunov(damped_system(static_cast<int>(state.range(0))));
    const auto times = grid(10000, default_scan_window(lyap));
    for (auto _ : state) {
        auto out = Parallel ? gap_matrices(lyap, times) : gap_matrices_serial(lyap, times);
        benchmark::DoNotOptimize(out);
    }
}

template <bool Parallel>
void BM_MaxEigenvalues(benchmark::State& state) {
    const auto lyap = prepare_lyapunov(damped_system(static_cast<int>(state.range(0))));
    const auto mats = gap_matrices(lyap, grid(10000, default_scan_window(lyap)));
    for (auto _ : state) {
        auto out = Parallel ? max_eigenvalues(mats) : max_eigenvalues_serial(mats);
        benchmark::DoNotOptimize(out);
    }
}

template <bool Parallel>
void BM_RunJobs(benchmark::State& state) {
    const auto jobs = sweep_jobs(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto out = Parallel ? run_jobs(jobs) : run_jobs_serial(jobs);
        benchmark::DoNotOptimize(out);
    }
}

}  // namespace

BENCHMARK(BM_GapMatrices<false>)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GapMatrices<true>)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MaxEigenvalues<false>)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MaxEigenvalues<true>)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunJobs<false>)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunJobs<true>)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
