// Command-line front end: train / eval / encode / inspect / sweep.
// Exit codes: 0 success, 2 configuration or input error, 3 numeric failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "graphtx/attention_bias.hpp"
#include "graphtx/experiment.hpp"
#include "graphtx/positional.hpp"
#include "json.hpp"

namespace {

using namespace gtx;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.12g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

void emit_matrix(const Matrix& m, const std::string& out_path) {
  if (out_path.empty()) {
    write_matrix_csv(std::cout, m);
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot write " + out_path);
  write_matrix_csv(f, m);
}

Graph pick_graph(const std::string& path, int index) {
  Dataset ds = load_dataset(path);
  if (index < 0 || index >= static_cast<int>(ds.graphs.size()))
    throw ConfigError("graph index " + std::to_string(index) + " outside [0, " +
                      std::to_string(ds.graphs.size()) + ")");
  return ds.graphs[static_cast<size_t>(index)];
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  cfg.validate();
  RunResult res = run_train(cfg, out_dir);
  std::cout << "config " << cfg.hash() << " finished at step " << res.final_step << "\n";
  for (const auto& r : res.records)
    if (r.step == res.final_step)
      std::cout << r.split << " " << r.metric << " = " << format_csv_value(r.value) << "\n";
  std::cout << "results: " << out_dir << "/results.csv\n";
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& split) {
  ResultRecord r = evaluate_checkpoint(checkpoint, split);
  std::cout << kResultsCsvHeader << "\n" << format_csv_row(r) << "\n";
  return kExitOk;
}

int cmd_encode(const std::string& graph_path, const std::string& kind, int size, int index,
               uint64_t seed, const std::string& out_path) {
  Graph g = pick_graph(graph_path, index);
  Matrix pe;
  if (kind == "degree") {
    Rng rng = make_rng(seed, "encode_degree");
    Matrix table(kDegreeBuckets, size);
    for (int i = 0; i < table.rows(); ++i)
      for (int j = 0; j < table.cols(); ++j)
        table(i, j) = rng.uniform(-1.0 / std::sqrt(double(size)), 1.0 / std::sqrt(double(size)));
    pe = g.directed() ? degree_pe(g, table, table) : degree_pe(g, table);
  } else if (kind == "eig") {
    pe = laplacian_pe(g, size);
  } else if (kind == "svd") {
    pe = svd_pe(g, size);
  } else {
    throw ConfigError("unknown pe kind: " + kind);
  }
  emit_matrix(pe, out_path);
  return kExitOk;
}

int cmd_inspect(const std::string& graph_path, const std::string& kind, int index, int hops,
                int views, int head, int heads, const std::string& kernel_kind,
                double kernel_param, uint64_t seed, const std::string& out_path) {
  Graph g = pick_graph(graph_path, index);
  StructOptions opts;
  opts.hop_masks = std::max(1, hops);
  if (kind == "kernel")
    opts.kernel = KernelSpec{kernel_kind == "p-step-rw" ? KernelKind::PStepRandomWalk
                                                        : KernelKind::Diffusion,
                             kernel_param};
  StructCache sc = StructCache::build(g, opts);
  if (head < 0 || head >= heads) throw ConfigError("head index outside [0, heads)");

  Matrix out;
  if (kind == "mask-1") {
    out = mask1_modifier(sc).head_masks[0];
  } else if (kind == "mask-n") {
    AttnModifier mod = maskn_modifier(sc, heads, hops);
    out = mod.head_masks[static_cast<size_t>(head)];
  } else if (kind == "spb") {
    Rng rng = make_rng(seed, "inspect_spb");
    Matrix table(kSpdBuckets, heads);
    for (int i = 0; i < table.rows(); ++i)
      for (int j = 0; j < table.cols(); ++j) table(i, j) = rng.uniform(-0.5, 0.5);
    Tape t;
    AttnModifier mod = spatial_bias_modifier(t, spd_bucket_onehot(sc.spd, g.n()), t.leaf(table),
                                             heads, g.n());
    out = t.value(mod.head_bias[static_cast<size_t>(head)]);
  } else if (kind == "pma") {
    Rng rng = make_rng(seed, "inspect_pma");
    Matrix b(views, heads);
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) b(i, j) = rng.uniform(-0.5, 0.5);
    Tape t;
    AttnModifier mod = pma_bias_modifier(t, pma_phi_matrix(g, views, g.n()), t.leaf(b), heads, g.n());
    out = t.value(mod.head_bias[static_cast<size_t>(head)]);
  } else if (kind == "kernel") {
    out = *sc.kernel;
  } else {
    throw ConfigError("unknown at kind: " + kind);
  }
  emit_matrix(out, out_path);
  return kExitOk;
}

int cmd_sweep(const std::string& grid_path, const std::string& out_dir) {
  std::ifstream in(grid_path);
  if (!in) throw ConfigError("cannot open " + grid_path);
  nlohmann::json grid;
  try {
    grid = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: invalid JSON: ") + e.what());
  }

  const auto variants = grid.value("variants", std::vector<std::string>{"vanilla"});
  const auto sizes = grid.value("sizes", std::vector<std::string>{"small"});
  const auto tasks = grid.value("tasks", std::vector<std::string>{});
  const auto seeds = grid.value("seeds", std::vector<uint64_t>{0});
  if (tasks.empty()) throw ConfigError("grid: tasks list is required");
  const std::string base = grid.contains("base") ? grid["base"].dump() : "{}";

  std::filesystem::create_directories(out_dir);
  std::vector<ResultRecord> all;
  // final test metric per (variant, task|size), median over seeds
  std::map<std::string, std::map<std::string, std::vector<double>>> table;

  for (const auto& task : tasks) {
    for (const auto& size : sizes) {
      for (const auto& variant : variants) {
        std::vector<double> finals;
        for (uint64_t seed : seeds) {
          nlohmann::json cj = nlohmann::json::parse(base);
          cj["task"] = task;
          cj["size"] = size;
          cj["variant"] = variant;
          cj["seed"] = seed;
          ExperimentConfig cfg = ExperimentConfig::from_json_text(cj.dump());
          cfg.validate();
          RunResult res = run_experiment(cfg);
          all.insert(all.end(), res.records.begin(), res.records.end());
          finals.push_back(res.final_test_metric);
          std::cout << variant << " " << task << " " << size << " seed " << seed << " -> test "
                    << format_csv_value(res.final_test_metric) << "\n";
        }
        std::sort(finals.begin(), finals.end());
        table[variant][task + "|" + size] = finals;
      }
    }
  }
  write_results_csv(out_dir + "/results.csv", all, /*append=*/true);

  std::ofstream summary(out_dir + "/summary.csv");
  summary << "variant";
  std::vector<std::string> cols;
  for (const auto& task : tasks)
    for (const auto& size : sizes) cols.push_back(task + "|" + size);
  for (const auto& c : cols) summary << "," << c;
  summary << "\n";
  for (const auto& variant : variants) {
    summary << variant;
    for (const auto& c : cols) {
      const auto& v = table[variant][c];
      summary << "," << format_csv_value(v[v.size() / 2]);
    }
    summary << "\n";
  }
  std::cout << "summary: " << out_dir << "/summary.csv\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph transformer benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, checkpoint, split = "test";
  std::string graph_path, pe_kind, at_kind, out_path, kernel_kind = "diffusion";
  std::string grid_path;
  int size = 4, index = 0, hops = 2, views = 3, head = 0, heads = 8;
  double kernel_param = 0.5;
  uint64_t seed = 0;

  auto* train = app.add_subcommand("train", "train one configured experiment");
  train->add_option("--config", config_path, "experiment config JSON")->required();
  train->add_option("--out", out_dir, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "evaluate a saved checkpoint");
  eval->add_option("--checkpoint", checkpoint, "directory written by train")->required();
  eval->add_option("--split", split, "train | valid | test");

  auto* encode = app.add_subcommand("encode", "dump a positional-encoding matrix as CSV");
  encode->add_option("--graph", graph_path, "dataset JSON file")->required();
  encode->add_option("--pe", pe_kind, "degree | eig | svd")->required();
  encode->add_option("--size", size, "embedding size k/r (table width for degree)");
  encode->add_option("--index", index, "graph index within the file");
  encode->add_option("--seed", seed, "table seed for the degree kind");
  encode->add_option("--out", out_path, "output file (default: stdout)");

  auto* inspect = app.add_subcommand("inspect", "dump a built attention mask/bias as CSV");
  inspect->add_option("--graph", graph_path, "dataset JSON file")->required();
  inspect->add_option("--at", at_kind, "mask-1 | mask-n | spb | pma | kernel")->required();
  inspect->add_option("--index", index, "graph index within the file");
  inspect->add_option("--hops", hops, "mask-n hop count");
  inspect->add_option("--views", views, "pma structural views");
  inspect->add_option("--head", head, "head to dump");
  inspect->add_option("--heads", heads, "total head count");
  inspect->add_option("--kernel-kind", kernel_kind, "diffusion | p-step-rw");
  inspect->add_option("--kernel-param", kernel_param, "beta or p");
  inspect->add_option("--seed", seed, "seed for inspected learnable tables");
  inspect->add_option("--out", out_path, "output file (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "cartesian variant x size x task grid");
  sweep->add_option("--grid", grid_path, "grid JSON file")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return cmd_train(config_path, out_dir);
    if (*eval) return cmd_eval(checkpoint, split);
    if (*encode) return cmd_encode(graph_path, pe_kind, size, index, seed, out_path);
    if (*inspect)
      return cmd_inspect(graph_path, at_kind, index, hops, views, head, heads, kernel_kind,
                         kernel_param, seed, out_path);
    if (*sweep) return cmd_sweep(grid_path, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MetricError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
