#include <benchmark/benchmark.h>

#include "krein/krein_method.hpp"
#include "krein/nystrom.hpp"
#include "krein/symmetric.hpp"

namespace {

krein::KernelTable smooth_table(int n) {
    const krein::Grid grid = krein::make_grid(0.0, 1.0, n);
    krein::KernelSpec spec;
    spec.kind = krein::KernelSpec::Kind::General;
    spec.block_dim = 2;
    spec.eval = [](double t, double s) {
        krein::Block b(2, 2);
        b(0, 0) = 0.3 * std::cos(t - s);
        b(0, 1) = 0.2 * std::sin(t + s);
        b(1, 0) = 0.1 * std::cos(t * s);
        b(1, 1) = 0.25;
        return b;
    };
    return krein::sample_kernel(spec, grid);
}

krein::VectorTable ones_rhs(const krein::Grid& grid, int m) {
    return krein::sample_rhs(grid, [m](double) { return krein::ColVec::Ones(m); });
}

void BM_SolveFull(benchmark::State& state) {
    const krein::KernelTable K = smooth_table(static_cast<int>(state.range(0)));
    const krein::VectorTable f = ones_rhs(K.grid, K.block_dim);
    for (auto _ : state)
        benchmark::DoNotOptimize(krein::solve_full(K, f));
}
BENCHMARK(BM_SolveFull)->Arg(33)->Arg(65)->Arg(129);

void BM_BuildFamily(benchmark::State& state) {
    const krein::KernelTable K = smooth_table(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(krein::build_family(K));
}
BENCHMARK(BM_BuildFamily)->Arg(17)->Arg(33)->Arg(65);

void BM_KreinSolve(benchmark::State& state) {
    const krein::KernelTable K = smooth_table(static_cast<int>(state.range(0)));
    const krein::VectorTable f = ones_rhs(K.grid, K.block_dim);
    const krein::TruncatedFamily fam = krein::build_family(K);
    const krein::Accumulator acc = krein::build_accumulator(fam);
    for (auto _ : state)
        benchmark::DoNotOptimize(krein::krein_solve(fam, acc, f));
}
BENCHMARK(BM_KreinSolve)->Arg(17)->Arg(33)->Arg(65);

void BM_ResolventFamily(benchmark::State& state) {
    const krein::KernelTable K = smooth_table(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(krein::resolvent_family(K));
}
BENCHMARK(BM_ResolventFamily)->Arg(17)->Arg(33)->Arg(65);

}  // namespace

BENCHMARK_MAIN();
