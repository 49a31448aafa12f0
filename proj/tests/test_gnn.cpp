#include "doctest.h"
#include "grad_check.hpp"
#include "graphtx/gnn.hpp"
#include "graphtx/model.hpp"
#include "test_util.hpp"

using namespace gtx;
using gtxtest::grad_check;
using gtxtest::random_er_graph;
using gtxtest::random_matrix;

TEST_SUITE_BEGIN("gnn");

TEST_CASE("gcn on an isolated node with identity weight returns the input") {
  Graph lonely = Graph::from_edges(1, false, {}, Matrix::filled(1, 3, 1.0));
  GnnContext ctx = GnnContext::build(lonely);
  Matrix x{{0.5, 1.5, 2.5}};  // positive, so relu acts as identity
  Tape t;
  GnnParamIds p;
  p.kind = GnnKind::Gcn;
  p.w = t.leaf(Matrix::identity(3));
  NodeId out = gnn_layer_forward(t, ctx, t.constant(x), p, Activation::Relu);
  CHECK(max_abs_diff(t.value(out), x) == 0.0);
}

TEST_CASE("zero weights give zero output for every gnn kind") {
  Rng rng(101);
  Graph g = random_er_graph(5, 0.5, rng);
  GnnContext ctx = GnnContext::build(g);
  Matrix x = random_matrix(5, 4, rng);
  for (GnnKind kind : {GnnKind::Gcn, GnnKind::GatLite, GnnKind::Gin}) {
    Tape t;
    GnnParamIds p;
    p.kind = kind;
    p.w = t.leaf(Matrix(4, 4));
    p.a_src = t.leaf(Matrix(4, 1));
    p.a_dst = t.leaf(Matrix(4, 1));
    p.eps = t.leaf(Matrix(1, 1));
    p.w1 = t.leaf(Matrix(4, 4));
    p.b1 = t.leaf(Matrix(1, 4));
    p.w2 = t.leaf(Matrix(4, 4));
    p.b2 = t.leaf(Matrix(1, 4));
    NodeId out = gnn_layer_forward(t, ctx, t.constant(x), p, Activation::Gelu);
    CHECK(frobenius_norm(t.value(out)) == 0.0);
  }
}

TEST_CASE("gcn matches the dense normalized-adjacency oracle") {
  Rng rng(102);
  Graph g = random_er_graph(7, 0.4, rng);
  GnnContext ctx = GnnContext::build(g);
  Matrix x = random_matrix(7, 3, rng);
  Matrix w = random_matrix(3, 3, rng);
  Tape t;
  GnnParamIds p;
  p.kind = GnnKind::Gcn;
  p.w = t.leaf(w);
  NodeId out = gnn_layer_forward(t, ctx, t.constant(x), p, Activation::Relu);
  Matrix want = relu(matmul(gcn_normalized_adjacency(g), matmul(x, w)));
  CHECK(max_abs_diff(t.value(out), want) < 1e-12);
}

TEST_CASE("gcn on a regular graph averages the closed neighborhood with 1/(deg+1)") {
  // C4 cycle: 2-regular, every coefficient is 1/3
  Graph c4 = Graph::from_edges(
      4, false, {{0, 1, std::nullopt}, {1, 2, std::nullopt}, {2, 3, std::nullopt}, {0, 3, std::nullopt}},
      Matrix(4, 1));
  GnnContext ctx = GnnContext::build(c4);
  Matrix x = Matrix::filled(4, 2, 0.0);
  for (int i = 0; i < 4; ++i) {
    x(i, 0) = 1.0 + i;
    x(i, 1) = 2.0 * i;
  }
  Tape t;
  GnnParamIds p;
  p.kind = GnnKind::Gcn;
  p.w = t.leaf(Matrix::identity(2));
  NodeId out = gnn_layer_forward(t, ctx, t.constant(x), p, Activation::Relu);
  for (int i = 0; i < 4; ++i) {
    const int prev = (i + 3) % 4, next = (i + 1) % 4;
    for (int j = 0; j < 2; ++j) {
      const double want = (x(i, j) + x(prev, j) + x(next, j)) / 3.0;
      CHECK(t.value(out)(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("gin honors its (1+eps) self weighting") {
  Graph g = gtxtest::path_graph(3);
  GnnContext ctx = GnnContext::build(g);
  Rng rng(103);
  Matrix x = random_matrix(3, 2, rng);
  Matrix eps{{0.25}};
  Tape t;
  GnnParamIds p;
  p.kind = GnnKind::Gin;
  p.eps = t.leaf(eps);
  p.w1 = t.leaf(Matrix::identity(2));
  p.b1 = t.leaf(Matrix(1, 2));
  p.w2 = t.leaf(Matrix::identity(2));
  p.b2 = t.leaf(Matrix(1, 2));
  NodeId out = gnn_layer_forward(t, ctx, t.constant(x), p, Activation::Relu);
  Matrix agg = matmul(g.adjacency(), x);
  Matrix want = relu(add(scale(x, 1.25), agg));
  CHECK(max_abs_diff(t.value(out), want) < 1e-12);
}

TEST_CASE("gat-lite attends only over neighbors and self") {
  Rng rng(104);
  Graph g = Graph::from_edges(4, false, {{0, 1, std::nullopt}, {2, 3, std::nullopt}}, Matrix(4, 1));
  GnnContext ctx = GnnContext::build(g);
  Matrix x = random_matrix(4, 3, rng);
  Tape t;
  GnnParamIds p;
  p.kind = GnnKind::GatLite;
  p.w = t.leaf(random_matrix(3, 3, rng));
  p.a_src = t.leaf(random_matrix(3, 1, rng));
  p.a_dst = t.leaf(random_matrix(3, 1, rng));
  NodeId out = gnn_layer_forward(t, ctx, t.constant(x), p, Activation::Relu);
  CHECK(t.value(out).rows() == 4);
  // components do not interact: recompute on the strict pair subgraph
  Graph pair = Graph::from_edges(2, false, {{0, 1, std::nullopt}}, Matrix(2, 1));
  GnnContext pctx = GnnContext::build(pair);
  Matrix xp(2, 3);
  for (int j = 0; j < 3; ++j) {
    xp(0, j) = x(0, j);
    xp(1, j) = x(1, j);
  }
  Tape t2;
  GnnParamIds p2 = p;
  p2.w = t2.leaf(t.value(p.w));
  p2.a_src = t2.leaf(t.value(p.a_src));
  p2.a_dst = t2.leaf(t.value(p.a_dst));
  NodeId out2 = gnn_layer_forward(t2, pctx, t2.constant(xp), p2, Activation::Relu);
  for (int j = 0; j < 3; ++j) {
    CHECK(t.value(out)(0, j) == doctest::Approx(t2.value(out2)(0, j)).epsilon(1e-12));
    CHECK(t.value(out)(1, j) == doctest::Approx(t2.value(out2)(1, j)).epsilon(1e-12));
  }
}

TEST_CASE("residual stack with zero weights is the identity") {
  Rng rng(105);
  Graph g = random_er_graph(5, 0.4, rng);
  GnnContext ctx = GnnContext::build(g);
  Matrix x = random_matrix(5, 3, rng);
  Tape t;
  std::vector<GnnParamIds> layers;
  for (int i = 0; i < 2; ++i) {
    GnnParamIds p;
    p.kind = GnnKind::Gcn;
    p.w = t.leaf(Matrix(3, 3));
    layers.push_back(p);
  }
  NodeId out = gnn_stack_with_residual(t, ctx, t.constant(x), layers, Activation::Relu);
  CHECK(max_abs_diff(t.value(out), x) == 0.0);
}

TEST_CASE("alternate composition equals a hand-composed block") {
  Rng rng(107);
  Graph g = random_er_graph(6, 0.45, rng);
  ModelConfig cfg;
  cfg.layers = 1; cfg.d = 8; cfg.d_f = 8; cfg.heads = 2; cfg.head_dim = 4;
  VariantDesc v = VariantDesc::parse("ga:alternate:gcn");
  Model model = Model::build(cfg, v, 4, 1, false, 0, 42);
  Instance inst = make_instance(g, v, cfg, g.n(), -1, 0.0);

  Tape ta;
  const Matrix got = ta.value(model.forward(ta, model.bind(ta), inst, ReadoutKind::MaskedMean));

  // independent assembly: input projection -> MHSA -> +gnn -> FFN -> readout -> head
  Tape t;
  auto C = [&](const char* name) { return t.constant(model.param(name)); };
  NodeId x0 = t.add_rowvec(t.matmul(t.constant(inst.tokens), C("in.w")), C("in.b"));
  LayerParamIds lp{C("L0.q"),     C("L0.k"),     C("L0.v"),     C("L0.o"),
                   C("L0.w1"),    C("L0.b1"),    C("L0.w2"),    C("L0.b2"),
                   C("L0.ln1_g"), C("L0.ln1_b"), C("L0.ln2_g"), C("L0.ln2_b")};
  std::vector<double> valid(g.n(), 1.0);
  NodeId m = mhsa_forward(t, x0, lp, cfg, AttnModifier{}, &valid);
  GnnParamIds gp;
  gp.kind = GnnKind::Gcn;
  gp.w = C("ga0.w");
  NodeId mprime = t.add(m, gnn_layer_forward(t, inst.gnn_ctx, m, gp, cfg.activation));
  NodeId z = ffn_forward(t, mprime, lp, cfg);
  NodeId read = apply_readout(t, z, ReadoutKind::MaskedMean, -1, &valid);
  NodeId pred = t.add_rowvec(t.matmul(read, C("out.w")), C("out.b"));
  CHECK(max_abs_diff(got, t.value(pred)) == 0.0);
}

TEST_CASE("parallel composition equals a hand-composed graph-residual block") {
  Rng rng(108);
  Graph g = random_er_graph(6, 0.45, rng);
  ModelConfig cfg;
  cfg.layers = 1; cfg.d = 8; cfg.d_f = 8; cfg.heads = 2; cfg.head_dim = 4;
  VariantDesc v = VariantDesc::parse("ga:parallel:gcn");
  Model model = Model::build(cfg, v, 4, 1, false, 0, 43);
  Instance inst = make_instance(g, v, cfg, g.n(), -1, 0.0);

  Tape ta;
  const Matrix got = ta.value(model.forward(ta, model.bind(ta), inst, ReadoutKind::MaskedMean));

  Tape t;
  auto C = [&](const char* name) { return t.constant(model.param(name)); };
  NodeId x0 = t.add_rowvec(t.matmul(t.constant(inst.tokens), C("in.w")), C("in.b"));
  LayerParamIds lp{C("L0.q"),     C("L0.k"),     C("L0.v"),     C("L0.o"),
                   C("L0.w1"),    C("L0.b1"),    C("L0.w2"),    C("L0.b2"),
                   C("L0.ln1_g"), C("L0.ln1_b"), C("L0.ln2_g"), C("L0.ln2_b")};
  std::vector<double> valid(g.n(), 1.0);
  NodeId m = mhsa_forward(t, x0, lp, cfg, AttnModifier{}, &valid);
  NodeId gres = t.matmul(t.matmul(t.constant(inst.gnn_ctx.norm_adj), x0), C("ga0.wr"));
  NodeId z = ffn_forward(t, t.add(m, gres), lp, cfg);
  NodeId read = apply_readout(t, z, ReadoutKind::MaskedMean, -1, &valid);
  NodeId pred = t.add_rowvec(t.matmul(read, C("out.w")), C("out.b"));
  CHECK(max_abs_diff(got, t.value(pred)) == 0.0);
}

TEST_CASE("before composition preprocesses with the residual gnn stack") {
  Rng rng(109);
  Graph g = random_er_graph(6, 0.45, rng);
  ModelConfig cfg;
  cfg.layers = 1; cfg.d = 8; cfg.d_f = 8; cfg.heads = 2; cfg.head_dim = 4;
  VariantDesc v = VariantDesc::parse("ga:before:gcn");
  Model model = Model::build(cfg, v, 4, 1, false, 0, 44);
  Instance inst = make_instance(g, v, cfg, g.n(), -1, 0.0);

  Tape ta;
  const Matrix got = ta.value(model.forward(ta, model.bind(ta), inst, ReadoutKind::MaskedMean));

  Tape t;
  auto C = [&](const char* name) { return t.constant(model.param(name)); };
  NodeId x = t.add_rowvec(t.matmul(t.constant(inst.tokens), C("in.w")), C("in.b"));
  for (int i = 0; i < 2; ++i) {  // default stack depth
    GnnParamIds gp;
    gp.kind = GnnKind::Gcn;
    gp.w = C(("ga" + std::to_string(i) + ".w").c_str());
    x = t.add(x, gnn_layer_forward(t, inst.gnn_ctx, x, gp, cfg.activation));
  }
  LayerParamIds lp{C("L0.q"),     C("L0.k"),     C("L0.v"),     C("L0.o"),
                   C("L0.w1"),    C("L0.b1"),    C("L0.w2"),    C("L0.b2"),
                   C("L0.ln1_g"), C("L0.ln1_b"), C("L0.ln2_g"), C("L0.ln2_b")};
  std::vector<double> valid(g.n(), 1.0);
  NodeId m = mhsa_forward(t, x, lp, cfg, AttnModifier{}, &valid);
  NodeId z = ffn_forward(t, m, lp, cfg);
  NodeId read = apply_readout(t, z, ReadoutKind::MaskedMean, -1, &valid);
  NodeId pred = t.add_rowvec(t.matmul(read, C("out.w")), C("out.b"));
  CHECK(max_abs_diff(got, t.value(pred)) == 0.0);
}

TEST_CASE("gradients through every gnn parameter match finite differences") {
  Rng rng(106);
  Graph g = random_er_graph(5, 0.5, rng);
  GnnContext ctx = GnnContext::build(g);
  Matrix x = random_matrix(5, 3, rng);

  // gcn
  {
    auto fn = [&](Tape& t, const std::vector<NodeId>& p) {
      GnnParamIds ids;
      ids.kind = GnnKind::Gcn;
      ids.w = p[0];
      NodeId out = gnn_layer_forward(t, ctx, t.constant(x), ids, Activation::Gelu);
      return t.mean_all(t.hadamard(out, out));
    };
    CHECK(grad_check(fn, {random_matrix(3, 3, rng)}).max_rel_err < 1e-4);
  }
  // gin (eps + MLP)
  {
    auto fn = [&](Tape& t, const std::vector<NodeId>& p) {
      GnnParamIds ids;
      ids.kind = GnnKind::Gin;
      ids.eps = p[0];
      ids.w1 = p[1];
      ids.b1 = p[2];
      ids.w2 = p[3];
      ids.b2 = p[4];
      NodeId out = gnn_layer_forward(t, ctx, t.constant(x), ids, Activation::Gelu);
      return t.mean_all(t.hadamard(out, out));
    };
    CHECK(grad_check(fn, {Matrix{{0.1}}, random_matrix(3, 3, rng), random_matrix(1, 3, rng),
                          random_matrix(3, 3, rng), random_matrix(1, 3, rng)})
              .max_rel_err < 1e-4);
  }
  // gat-lite
  {
    auto fn = [&](Tape& t, const std::vector<NodeId>& p) {
      GnnParamIds ids;
      ids.kind = GnnKind::GatLite;
      ids.w = p[0];
      ids.a_src = p[1];
      ids.a_dst = p[2];
      NodeId out = gnn_layer_forward(t, ctx, t.constant(x), ids, Activation::Gelu);
      return t.mean_all(t.hadamard(out, out));
    };
    CHECK(grad_check(fn, {random_matrix(3, 3, rng), random_matrix(3, 1, rng),
                          random_matrix(3, 1, rng)})
              .max_rel_err < 1e-4);
  }
}

TEST_SUITE_END();
