#include <benchmark/benchmark.h>

#include "graphtx/experiment.hpp"
#include "graphtx/losses.hpp"
#include "graphtx/spectral.hpp"
#include "graphtx/structure.hpp"

using namespace gtx;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

Graph random_graph(int n, double p, Rng& rng) {
  std::vector<EdgeSpec> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.push_back({i, j, std::nullopt});
  return Graph::from_edges(n, false, edges, random_matrix(n, 4, rng));
}

void BM_matmul(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Matrix a = random_matrix(n, n, rng);
  Matrix b = random_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * 2L * n * n * n);
}
BENCHMARK(BM_matmul)->Arg(16)->Arg(80)->Arg(256);

void BM_row_softmax(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  Matrix a = random_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(row_softmax(a));
}
BENCHMARK(BM_row_softmax)->Arg(20)->Arg(80);

void BM_sym_eig(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s(i, j) = s(j, i) = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(s));
}
BENCHMARK(BM_sym_eig)->Arg(8)->Arg(20);

void BM_spd(benchmark::State& state) {
  Rng rng(4);
  Graph g = random_graph(static_cast<int>(state.range(0)), 0.3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(spd_matrix(g));
}
BENCHMARK(BM_spd)->Arg(12)->Arg(20);

void BM_diffusion_kernel(benchmark::State& state) {
  Rng rng(5);
  Graph g = random_graph(static_cast<int>(state.range(0)), 0.3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(graph_kernel(g, {KernelKind::Diffusion, 0.5}));
}
BENCHMARK(BM_diffusion_kernel)->Arg(12)->Arg(20);

void BM_forward(benchmark::State& state) {
  Rng rng(6);
  Graph g = random_graph(14, 0.35, rng);
  ModelConfig cfg = ModelConfig::from_size(SizeTag::Small);
  VariantDesc variant = VariantDesc::parse("at:mask-1");
  Model model = Model::build(cfg, variant, 4, 1, false, 0, 7);
  Instance inst = make_instance(g, variant, cfg, g.n(), -1, 0.4);
  for (auto _ : state) {
    Tape t;
    auto ids = model.bind(t);
    benchmark::DoNotOptimize(model.forward(t, ids, inst, ReadoutKind::MaskedMean));
  }
}
BENCHMARK(BM_forward);

void BM_train_step(benchmark::State& state) {
  Rng rng(8);
  Graph g = random_graph(14, 0.35, rng);
  ModelConfig cfg = ModelConfig::from_size(SizeTag::Small);
  VariantDesc variant = VariantDesc::parse("at:spb");
  Model model = Model::build(cfg, variant, 4, 1, false, 0, 9);
  Instance inst = make_instance(g, variant, cfg, g.n(), -1, 0.4);
  TrainState st = TrainState::init(model.params);
  AdamConfig adam;
  for (auto _ : state) {
    Tape t;
    auto ids = model.bind(t);
    NodeId pred = model.forward(t, ids, inst, ReadoutKind::MaskedMean);
    NodeId loss = loss_node(t, LossKind::Mae, pred, Matrix{{0.4}});
    auto grad_map = t.backward(loss);
    std::vector<Matrix> grads;
    for (NodeId id : ids) grads.push_back(std::move(grad_map.at(id)));
    adam_step(st, model.params, grads, adam, 1e-4);
  }
}
BENCHMARK(BM_train_step);

}  // namespace

BENCHMARK_MAIN();
