#include <mvlpe/dataio.hpp>
#include <mvlpe/lowrank.hpp>
#include <mvlpe/lpe.hpp>
#include <mvlpe/mvlpe.hpp>

#include <benchmark/benchmark.h>

namespace {

mvlpe::MultiViewDataset make_dataset(int n_per_class) {
  return mvlpe::synth_multiview(n_per_class, 3,
                                {{8, 0.05}, {12, 0.05}, {6, 0.05}}, 42);
}

void BM_lowrank_codes(benchmark::State& state) {
  const auto ds = make_dataset(static_cast<int>(state.range(0)));
  const auto& X = ds.views[0];
  const auto nbrs = mvlpe::knn_neighbors(X, 10);
  mvlpe::SolverOpts opts;
  for (auto _ : state) {
    auto codes = mvlpe::solve_lowrank_codes(X, nbrs, 1.0, opts);
    benchmark::DoNotOptimize(codes);
  }
}
BENCHMARK(BM_lowrank_codes)->Arg(20)->Arg(40);

void BM_embed_direct(benchmark::State& state) {
  const auto ds = make_dataset(static_cast<int>(state.range(0)));
  const auto& X = ds.views[0];
  const auto nbrs = mvlpe::knn_neighbors(X, 10);
  mvlpe::SolverOpts opts;
  const auto codes = mvlpe::solve_lowrank_codes(X, nbrs, 1.0, opts);
  const auto M = mvlpe::assemble_reconstruction_matrix(codes, static_cast<int>(X.cols()));
  for (auto _ : state) {
    auto emb = mvlpe::embed_direct(M, 5);
    benchmark::DoNotOptimize(emb);
  }
}
BENCHMARK(BM_embed_direct)->Arg(20)->Arg(40);

void BM_fit(benchmark::State& state) {
  const auto ds = make_dataset(static_cast<int>(state.range(0)));
  mvlpe::MvLpeConfig config;
  config.d_star = 3;
  for (auto _ : state) {
    auto model = mvlpe::fit(ds, config);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_fit)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
