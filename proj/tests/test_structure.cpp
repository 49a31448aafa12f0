#include "doctest.h"
#include "graphtx/spectral.hpp"
#include "graphtx/structure.hpp"
#include "test_util.hpp"

using namespace gtx;
using gtxtest::complete_graph;
using gtxtest::path_graph;
using gtxtest::random_er_graph;

namespace {

/// Floyd-Warshall oracle, independent of the BFS implementation.
Matrix floyd_warshall(const Graph& g) {
  const int n = g.n();
  const double inf = 1e18;
  Matrix d = Matrix::filled(n, n, inf);
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g.adjacency()(i, j) != 0.0) d(i, j) = 1.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (d(i, j) >= inf) d(i, j) = -1.0;
  return d;
}

/// 30-term Taylor series of exp(-beta L), the diffusion-kernel oracle.
Matrix diffusion_series(const Matrix& l, double beta) {
  const int n = l.rows();
  Matrix acc = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 30; ++k) {
    term = scale(matmul(term, l), -beta / k);
    acc = add(acc, term);
  }
  return acc;
}

}  // namespace

TEST_SUITE_BEGIN("structure");

TEST_CASE("degrees on paths and directed edges") {
  auto [in_p, out_p] = degrees(path_graph(3));
  CHECK(in_p == std::vector<double>{1, 2, 1});
  CHECK(out_p == std::vector<double>{1, 2, 1});

  Graph d = Graph::from_edges(2, true, {{0, 1, std::nullopt}}, Matrix(2, 1));
  auto [indeg, outdeg] = degrees(d);
  CHECK(indeg == std::vector<double>{0, 1});
  CHECK(outdeg == std::vector<double>{1, 0});
}

TEST_CASE("degrees equal adjacency row/column sums on random graphs") {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    Graph g = random_er_graph(4 + static_cast<int>(rng.below(8)), 0.35, rng);
    auto [indeg, outdeg] = degrees(g);
    for (int i = 0; i < g.n(); ++i) {
      double rs = 0.0, cs = 0.0;
      for (int j = 0; j < g.n(); ++j) {
        rs += g.adjacency()(i, j);
        cs += g.adjacency()(j, i);
      }
      CHECK(outdeg[i] == rs);
      CHECK(indeg[i] == cs);
    }
  }
}

TEST_CASE("normalized laplacian: K2, isolated node, spectrum bound") {
  Graph k2 = complete_graph(2);
  Matrix l = normalized_laplacian(k2);
  CHECK(l(0, 0) == 1.0);
  CHECK(l(0, 1) == -1.0);

  Graph isolated = Graph::from_edges(1, false, {}, Matrix(1, 1));
  Matrix li = normalized_laplacian(isolated);
  CHECK(li(0, 0) == 1.0);

  Rng rng(42);
  Graph g = random_er_graph(8, 0.4, rng);
  EigResult eig = sym_eig(normalized_laplacian(g));
  CHECK(eig.values.front() >= -1e-8);
  CHECK(eig.values.back() <= 2.0 + 1e-8);

  Graph dg = Graph::from_edges(2, true, {{0, 1, std::nullopt}}, Matrix(2, 1));
  CHECK_THROWS_AS(normalized_laplacian(dg), std::invalid_argument);
}

TEST_CASE("spd on P3 and disjoint components") {
  Matrix d = spd_matrix(path_graph(3));
  Matrix want{{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
  CHECK(max_abs_diff(d, want) == 0.0);

  Graph two = Graph::from_edges(4, false, {{0, 1, std::nullopt}, {2, 3, std::nullopt}}, Matrix(4, 1));
  Matrix d2 = spd_matrix(two);
  CHECK(d2(0, 2) == -1.0);
  CHECK(d2(1, 3) == -1.0);
  CHECK(d2(0, 1) == 1.0);
}

TEST_CASE("spd equals Floyd-Warshall on random graphs") {
  Rng rng(43);
  for (int t = 0; t < 25; ++t) {
    Graph g = random_er_graph(3 + static_cast<int>(rng.below(10)), rng.uniform(0.1, 0.6), rng);
    CHECK(max_abs_diff(spd_matrix(g), floyd_warshall(g)) == 0.0);
  }
}

TEST_CASE("spd triangle inequality over reachable triples (property)") {
  Rng rng(44);
  Graph g = random_er_graph(10, 0.3, rng);
  Matrix d = spd_matrix(g);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) {
        if (d(i, j) < 0 || d(j, k) < 0 || d(i, k) < 0) continue;
        CHECK(d(i, k) <= d(i, j) + d(j, k));
      }
}

TEST_CASE("hop masks: h=1 equals adjacency plus identity, saturation, monotone") {
  Graph p3 = path_graph(3);
  CHECK(max_abs_diff(hop_mask(p3, 1), add(p3.adjacency(), Matrix::identity(3))) == 0.0);
  CHECK(max_abs_diff(hop_mask(p3, 2), Matrix::filled(3, 3, 1.0)) == 0.0);
  CHECK_THROWS_AS(hop_mask(p3, 0), std::invalid_argument);

  Rng rng(45);
  Graph g = random_er_graph(9, 0.3, rng);
  Matrix spd = spd_matrix(g);
  for (int h = 1; h < 4; ++h) {
    Matrix lo = hop_mask_from_spd(spd, h);
    Matrix hi = hop_mask_from_spd(spd, h + 1);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        CHECK(lo(i, j) <= hi(i, j));
        CHECK(lo(i, j) == ((spd(i, j) >= 0 && spd(i, j) <= h) ? 1.0 : 0.0));
      }
  }
}

TEST_CASE("kernels: p=0 and beta=0 give identity") {
  Graph p3 = path_graph(3);
  CHECK(max_abs_diff(graph_kernel(p3, {KernelKind::PStepRandomWalk, 0.0}), Matrix::identity(3)) ==
        0.0);
  CHECK(max_abs_diff(graph_kernel(p3, {KernelKind::Diffusion, 0.0}), Matrix::identity(3)) < 1e-10);
  CHECK_THROWS_AS(graph_kernel(p3, {KernelKind::Diffusion, -0.5}), std::invalid_argument);
}

TEST_CASE("diffusion kernel matches the 30-term series oracle") {
  Graph p3 = path_graph(3);
  Matrix got = graph_kernel(p3, {KernelKind::Diffusion, 0.3});
  Matrix want = diffusion_series(normalized_laplacian(p3), 0.3);
  CHECK(max_abs_diff(got, want) < 1e-8);
}

TEST_CASE("kernels are symmetric PSD (property)") {
  Rng rng(46);
  for (int t = 0; t < 6; ++t) {
    Graph g = random_er_graph(7, 0.35, rng);
    for (KernelSpec spec : {KernelSpec{KernelKind::PStepRandomWalk, 3.0},
                            KernelSpec{KernelKind::Diffusion, 0.7}}) {
      Matrix k = graph_kernel(g, spec);
      CHECK(max_abs_diff(k, transpose(k)) < 1e-9);
      EigResult eig = sym_eig(scale(add(k, transpose(k)), 0.5));
      CHECK(eig.values.front() >= -1e-8);
    }
  }
}

TEST_CASE("shortest_path_edges: P3 endpoints, self, C4 tie-break") {
  Graph p3 = path_graph(3);
  auto path = shortest_path_edges(p3, 0, 2);
  REQUIRE(path.has_value());
  CHECK(*path == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
  CHECK(shortest_path_edges(p3, 1, 1)->empty());

  // C4: 0-1-2-3-0; opposite corners have two shortest paths, lowest-index wins
  Graph c4 = Graph::from_edges(
      4, false, {{0, 1, std::nullopt}, {1, 2, std::nullopt}, {2, 3, std::nullopt}, {0, 3, std::nullopt}},
      Matrix(4, 1));
  auto c4path = shortest_path_edges(c4, 0, 2);
  REQUIRE(c4path.has_value());
  CHECK(*c4path == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});

  Graph two = Graph::from_edges(4, false, {{0, 1, std::nullopt}, {2, 3, std::nullopt}}, Matrix(4, 1));
  CHECK(!shortest_path_edges(two, 0, 3).has_value());
}

TEST_CASE("StructCache bundles the per-graph precomputations") {
  Rng rng(47);
  Graph g = random_er_graph(8, 0.4, rng);
  StructOptions opts;
  opts.hop_masks = 3;
  opts.spectrum = true;
  opts.kernel = KernelSpec{KernelKind::Diffusion, 0.5};
  StructCache sc = StructCache::build(g, opts);
  CHECK(sc.hop_masks.size() == 3);
  CHECK(sc.laplacian.has_value());
  CHECK(sc.eigenvalues.has_value());
  CHECK(sc.kernel.has_value());
  CHECK(max_abs_diff(sc.spd, spd_matrix(g)) == 0.0);
  for (int i = 0; i < g.n(); ++i) CHECK(sc.degree_matrix(i, i) == sc.outdegree[i]);
}

TEST_SUITE_END();
