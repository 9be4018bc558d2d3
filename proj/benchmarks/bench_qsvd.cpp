#include <benchmark/benchmark.h>

#include "qsvd/qsvd.hpp"

using namespace qsvd;

namespace {

void BM_DenseMatvec(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const QuatMatrix m = random_dense_quat(n, n, 1);
    Rng rng(2);
    const CompactVector x = CompactVector::random_unit(n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(structured_matvec(m, x));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_DenseMatvec)->Arg(100)->Arg(300)->Arg(1000);

void BM_SparseMatvec(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const QuatMatrix m = synthetic_sparse_quat(n, 1);
    Rng rng(2);
    const CompactVector x = CompactVector::random_unit(n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(structured_matvec(m, x, true));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.stored_entries()));
}
BENCHMARK(BM_SparseMatvec)->Arg(300)->Arg(3000);

void BM_LanczosBidiag(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const QuatMatrix m = random_dense_quat(200, 150, 3);
    for (auto _ : state) {
        Rng rng(4);
        benchmark::DoNotOptimize(lanczos_bidiag(m, CompactVector::random_unit(150, rng), k, rng));
    }
}
BENCHMARK(BM_LanczosBidiag)->Arg(20)->Arg(60);

void BM_DenseSvd(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(5);
    DenseMatrix a(n, n);
    for (double& x : a.data()) x = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(dense_svd(a));
}
BENCHMARK(BM_DenseSvd)->Arg(20)->Arg(40)->Arg(80);

void BM_SolveSparse(benchmark::State& state) {
    const QuatMatrix m = synthetic_sparse_quat(300, 1);
    SolverOptions o;
    o.k = 10;
    o.mb = 40;
    o.which = state.range(0) == 0 ? Which::Largest : Which::Smallest;
    for (auto _ : state) benchmark::DoNotOptimize(solve_partial_svd(m, o));
    state.SetLabel(state.range(0) == 0 ? "largest" : "smallest");
}
BENCHMARK(BM_SolveSparse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SolveDense(benchmark::State& state) {
    const QuatMatrix m = random_dense_quat(100, 80, 6);
    SolverOptions o;
    o.k = 10;
    o.which = state.range(0) == 0 ? Which::Largest : Which::Smallest;
    for (auto _ : state) benchmark::DoNotOptimize(solve_partial_svd(m, o));
    state.SetLabel(state.range(0) == 0 ? "largest" : "smallest");
}
BENCHMARK(BM_SolveDense)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
