#include "graphtx/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graphtx/losses.hpp"
#include "graphtx/sample.hpp"
#include "json.hpp"

namespace gtx {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* section, const char* key, T& out,
                std::vector<std::string>& errors) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    errors.push_back(std::string(section) + key + ": wrong type");
  }
}

void check_known_keys(const json& j, const char* section,
                      const std::vector<std::string>& known, std::vector<std::string>& errors) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      errors.push_back(std::string(section) + it.key() + ": unknown field");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: document must be an object");

  ExperimentConfig cfg;
  std::vector<std::string> errors;
  check_known_keys(
      doc, "", {"seed", "size", "variant", "task", "metric", "model", "training", "sampler", "data"},
      errors);
  read_field(doc, "", "seed", cfg.seed, errors);
  read_field(doc, "", "size", cfg.size, errors);
  read_field(doc, "", "variant", cfg.variant, errors);
  read_field(doc, "", "task", cfg.task, errors);
  if (doc.contains("metric")) {
    std::string m;
    read_field(doc, "", "metric", m, errors);
    cfg.metric = m;
  }
  if (doc.contains("model")) {
    const json& m = doc["model"];
    if (!m.is_object()) {
      errors.push_back("model: must be an object");
    } else {
      check_known_keys(m, "model.", {"layers", "d", "d_f", "heads", "head_dim"}, errors);
      ModelOverride ov;
      read_field(m, "model.", "layers", ov.layers, errors);
      read_field(m, "model.", "d", ov.d, errors);
      read_field(m, "model.", "d_f", ov.d_f, errors);
      read_field(m, "model.", "heads", ov.heads, errors);
      read_field(m, "model.", "head_dim", ov.head_dim, errors);
      cfg.model = ov;
    }
  }
  if (doc.contains("training")) {
    const json& t = doc["training"];
    if (!t.is_object()) {
      errors.push_back("training: must be an object");
    } else {
      check_known_keys(t, "training.",
                       {"attention_dropout", "ffn_dropout", "max_steps", "warmup_steps", "peak_lr",
                        "batch_size", "weight_decay", "clip_norm", "adam_eps", "adam_beta1",
                        "adam_beta2", "lr_decay", "eval_interval", "early_stop_metric_value"},
                       errors);
      read_field(t, "training.", "attention_dropout", cfg.training.attention_dropout, errors);
      read_field(t, "training.", "ffn_dropout", cfg.training.ffn_dropout, errors);
      read_field(t, "training.", "max_steps", cfg.training.max_steps, errors);
      read_field(t, "training.", "warmup_steps", cfg.training.warmup_steps, errors);
      read_field(t, "training.", "peak_lr", cfg.training.peak_lr, errors);
      read_field(t, "training.", "batch_size", cfg.training.batch_size, errors);
      read_field(t, "training.", "weight_decay", cfg.training.weight_decay, errors);
      read_field(t, "training.", "clip_norm", cfg.training.clip_norm, errors);
      read_field(t, "training.", "adam_eps", cfg.training.adam_eps, errors);
      read_field(t, "training.", "adam_beta1", cfg.training.adam_beta1, errors);
      read_field(t, "training.", "adam_beta2", cfg.training.adam_beta2, errors);
      read_field(t, "training.", "lr_decay", cfg.training.lr_decay, errors);
      read_field(t, "training.", "eval_interval", cfg.training.eval_interval, errors);
      if (t.contains("early_stop_metric_value")) {
        double v = 0.0;
        read_field(t, "training.", "early_stop_metric_value", v, errors);
        cfg.training.early_stop_metric_value = v;
      }
    }
  }
  if (doc.contains("sampler")) {
    const json& s = doc["sampler"];
    if (!s.is_object()) {
      errors.push_back("sampler: must be an object");
    } else {
      check_known_keys(s, "sampler.", {"max_hop", "max_nbrs"}, errors);
      read_field(s, "sampler.", "max_hop", cfg.sampler.max_hop, errors);
      read_field(s, "sampler.", "max_nbrs", cfg.sampler.max_nbrs, errors);
    }
  }
  if (doc.contains("data")) {
    const json& d = doc["data"];
    if (!d.is_object()) {
      errors.push_back("data: must be an object");
    } else {
      check_known_keys(d, "data.", {"num_instances"}, errors);
      read_field(d, "data.", "num_instances", cfg.data.num_instances, errors);
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json doc;
  doc["seed"] = seed;
  doc["size"] = size;
  doc["variant"] = variant;
  doc["task"] = task;
  doc["metric"] = to_string(resolved_metric());
  if (model) {
    doc["model"] = {{"layers", model->layers},
                    {"d", model->d},
                    {"d_f", model->d_f},
                    {"heads", model->heads},
                    {"head_dim", model->head_dim}};
  }
  json t;
  t["attention_dropout"] = training.attention_dropout;
  t["ffn_dropout"] = training.ffn_dropout;
  t["max_steps"] = training.max_steps;
  t["warmup_steps"] = training.warmup_steps;
  t["peak_lr"] = training.peak_lr;
  t["batch_size"] = training.batch_size;
  t["weight_decay"] = training.weight_decay;
  t["clip_norm"] = training.clip_norm;
  t["adam_eps"] = training.adam_eps;
  t["adam_beta1"] = training.adam_beta1;
  t["adam_beta2"] = training.adam_beta2;
  t["lr_decay"] = training.lr_decay;
  t["eval_interval"] = training.eval_interval;
  if (training.early_stop_metric_value)
    t["early_stop_metric_value"] = *training.early_stop_metric_value;
  doc["training"] = std::move(t);
  doc["sampler"] = {{"max_hop", sampler.max_hop}, {"max_nbrs", sampler.max_nbrs}};
  doc["data"] = {{"num_instances", data.num_instances}};
  return doc.dump(1);
}

MetricKind ExperimentConfig::resolved_metric() const {
  const TaskSpec spec = task_spec(task);
  if (!metric) return spec.metric;
  return metric_from_string(*metric);
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  try {
    size_tag_from_string(size);
  } catch (const std::exception& e) {
    errors.push_back(std::string("size: ") + e.what());
  }
  try {
    VariantDesc::parse(variant);
  } catch (const std::exception& e) {
    errors.push_back(std::string("variant: ") + e.what());
  }
  TaskSpec spec;
  bool task_ok = true;
  try {
    spec = task_spec(task);
  } catch (const std::exception& e) {
    errors.push_back(std::string("task: ") + e.what());
    task_ok = false;
  }
  if (task_ok && metric) {
    try {
      const MetricKind m = metric_from_string(*metric);
      const bool regression = spec.loss == LossKind::Mae;
      const bool binary = spec.loss == LossKind::BceLogits;
      if (regression && m != MetricKind::Mae)
        errors.push_back("metric: regression tasks use mae");
      if (binary && m != MetricKind::RocAuc && m != MetricKind::AveragePrecision)
        errors.push_back("metric: binary classification uses roc_auc or ap");
    } catch (const std::exception& e) {
      errors.push_back(std::string("metric: ") + e.what());
    }
  }
  if (model) {
    if (model->layers < 0 || model->d <= 0 || model->d_f <= 0 || model->heads <= 0 ||
        model->head_dim <= 0)
      errors.push_back("model: all override dimensions must be positive");
    else if (model->heads * model->head_dim != model->d)
      errors.push_back("model: heads * head_dim must equal d");
  }
  const auto& t = training;
  if (t.attention_dropout < 0.0 || t.attention_dropout >= 1.0)
    errors.push_back("training.attention_dropout: must be in [0, 1)");
  if (t.ffn_dropout < 0.0 || t.ffn_dropout >= 1.0)
    errors.push_back("training.ffn_dropout: must be in [0, 1)");
  if (t.max_steps < 1 || t.max_steps > protocol::kMaxStepsCeiling)
    errors.push_back("training.max_steps: must be in [1, 1e6]");
  if (t.warmup_steps < 1) errors.push_back("training.warmup_steps: must be >= 1");
  if (t.peak_lr <= 0.0) errors.push_back("training.peak_lr: must be > 0");
  if (t.batch_size < 1) errors.push_back("training.batch_size: must be >= 1");
  if (t.weight_decay < 0.0) errors.push_back("training.weight_decay: must be >= 0");
  if (t.clip_norm < 0.0) errors.push_back("training.clip_norm: must be >= 0 (0 disables)");
  if (t.adam_eps <= 0.0) errors.push_back("training.adam_eps: must be > 0");
  if (t.adam_beta1 < 0.0 || t.adam_beta1 >= 1.0)
    errors.push_back("training.adam_beta1: must be in [0, 1)");
  if (t.adam_beta2 < 0.0 || t.adam_beta2 >= 1.0)
    errors.push_back("training.adam_beta2: must be in [0, 1)");
  if (t.lr_decay != "linear") errors.push_back("training.lr_decay: only 'linear' is supported");
  if (t.eval_interval < 1) errors.push_back("training.eval_interval: must be >= 1");
  if (sampler.max_hop < 1) errors.push_back("sampler.max_hop: must be >= 1");
  if (sampler.max_nbrs < 1) errors.push_back("sampler.max_nbrs: must be >= 1");
  if (data.num_instances < 10) errors.push_back("data.num_instances: must be >= 10");
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
}

std::string ExperimentConfig::hash() const {
  const std::string text = to_json_text();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string format_csv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

std::string format_csv_row(const ResultRecord& r) {
  std::ostringstream os;
  os << r.config_hash << ',' << r.variant << ',' << r.task << ',' << r.size << ',' << r.seed << ','
     << r.step << ',' << r.split << ',' << r.metric << ',' << format_csv_value(r.value) << ','
     << r.wall_ms;
  return os.str();
}

void write_results_csv(const std::string& path, const std::vector<ResultRecord>& records,
                       bool append) {
  const bool exists = std::filesystem::exists(path);
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (!append || !exists) out << kResultsCsvHeader << "\n";
  for (const auto& r : records) out << format_csv_row(r) << "\n";
}

std::vector<ResultRecord> load_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader)
    throw std::runtime_error("results csv: bad header in " + path);
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[10];
    for (int i = 0; i < 10; ++i)
      if (!std::getline(ss, f[i], ','))
        throw std::runtime_error("results csv: short row: " + line);
    ResultRecord r;
    r.config_hash = f[0];
    r.variant = f[1];
    r.task = f[2];
    r.size = f[3];
    r.seed = std::stoull(f[4]);
    r.step = std::stol(f[5]);
    r.split = f[6];
    r.metric = f[7];
    r.value = std::stod(f[8]);
    r.wall_ms = std::stol(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

int split_bucket(int instance_index) {
  return static_cast<int>(stream_seed(0x517D0ULL, "split", instance_index) % 10);
}

// ---------------------------------------------------------------------------
// training pipeline
// ---------------------------------------------------------------------------

namespace {

struct Pipeline {
  ExperimentConfig cfg;
  TaskSpec task;
  ModelConfig mcfg;
  VariantDesc variant;
  MetricKind metric;
  Dataset data;
  int n_pad = 0;

  // graph-level: instance i = graph i; node-level: instance i = (graph, node)
  std::vector<std::pair<int, int>> node_map;
  std::vector<int> train_idx, valid_idx, test_idx;
  std::vector<Instance> graph_instances;              // graph-level, by graph id
  std::vector<std::pair<int, Instance>> eval_cache;   // node-level eval instances
};

Pipeline build_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  Pipeline p;
  p.cfg = cfg;
  p.task = task_spec(cfg.task);
  p.variant = VariantDesc::parse(cfg.variant);
  p.metric = cfg.resolved_metric();
  p.mcfg = ModelConfig::from_size(size_tag_from_string(cfg.size));
  if (cfg.model) {
    p.mcfg.layers = cfg.model->layers;
    p.mcfg.d = cfg.model->d;
    p.mcfg.d_f = cfg.model->d_f;
    p.mcfg.heads = cfg.model->heads;
    p.mcfg.head_dim = cfg.model->head_dim;
  }
  p.mcfg.attn_dropout = cfg.training.attention_dropout;
  p.mcfg.ffn_dropout = cfg.training.ffn_dropout;

  Rng data_rng = make_rng(cfg.seed, "dataset");
  p.data = gen_task(cfg.task, cfg.data.num_instances, data_rng);

  p.n_pad = 0;
  for (const auto& g : p.data.graphs) p.n_pad = std::max(p.n_pad, g.n());

  int n_instances = 0;
  if (p.task.level == TaskLevel::Graph) {
    n_instances = static_cast<int>(p.data.graphs.size());
  } else {
    for (int g = 0; g < static_cast<int>(p.data.graphs.size()); ++g)
      for (int v = 0; v < p.data.graphs[g].n(); ++v) p.node_map.emplace_back(g, v);
    n_instances = static_cast<int>(p.node_map.size());
  }
  for (int i = 0; i < n_instances; ++i) {
    const int b = split_bucket(i);
    (b <= 7 ? p.train_idx : b == 8 ? p.valid_idx : p.test_idx).push_back(i);
  }

  if (p.task.level == TaskLevel::Graph) {
    p.graph_instances.reserve(p.data.graphs.size());
    for (const auto& g : p.data.graphs)
      p.graph_instances.push_back(
          make_instance(g, p.variant, p.mcfg, p.n_pad, -1, *g.graph_label()));
  } else {
    // eval instances get one fixed subgraph each, from a dedicated stream
    for (const auto* split : {&p.valid_idx, &p.test_idx}) {
      for (int idx : *split) {
        const auto [gi, v] = p.node_map[idx];
        Rng srng = make_rng(cfg.seed, "eval_sample", idx);
        Subgraph sub =
            shadow_khop_sample(p.data.graphs[gi], v, cfg.sampler.max_hop, cfg.sampler.max_nbrs, srng);
        const double target = (*p.data.graphs[gi].node_labels())[v];
        p.eval_cache.emplace_back(
            idx, make_instance(std::move(sub.graph), p.variant, p.mcfg, p.n_pad, sub.target_index,
                               target));
      }
    }
  }
  return p;
}

Instance sample_train_instance(const Pipeline& p, int idx, Rng& rng) {
  const auto [gi, v] = p.node_map[idx];
  Subgraph sub = shadow_khop_sample(p.data.graphs[gi], v, p.cfg.sampler.max_hop,
                                    p.cfg.sampler.max_nbrs, rng);
  const double target = (*p.data.graphs[gi].node_labels())[v];
  return make_instance(std::move(sub.graph), p.variant, p.mcfg, p.n_pad, sub.target_index, target);
}

const Instance* find_eval_instance(const Pipeline& p, int idx) {
  for (const auto& [i, inst] : p.eval_cache)
    if (i == idx) return &inst;
  return nullptr;
}

double eval_split(const Pipeline& p, const Model& model, const std::vector<int>& split) {
  std::vector<double> scores, targets;
  std::vector<int> labels;
  for (int idx : split) {
    const Instance* inst = p.task.level == TaskLevel::Graph ? &p.graph_instances[idx]
                                                            : find_eval_instance(p, idx);
    if (!inst) throw std::logic_error("eval_split: missing cached instance");
    Tape t;
    auto ids = model.bind(t);
    const ReadoutKind readout =
        inst->target_index >= 0 ? ReadoutKind::TargetNode : ReadoutKind::MaskedMean;
    NodeId pred = model.forward(t, ids, *inst, readout);
    const double score = t.value(pred)(0, 0);
    scores.push_back(score);
    targets.push_back(inst->target);
    labels.push_back(inst->target > 0.5 ? 1 : 0);
  }
  switch (p.metric) {
    case MetricKind::Mae: return metric_mae(scores, targets);
    case MetricKind::RocAuc: return metric_roc_auc(scores, labels);
    case MetricKind::AveragePrecision: return metric_average_precision(scores, labels);
    case MetricKind::Accuracy: {
      std::vector<int> pred_cls;
      for (double s : scores) pred_cls.push_back(s > 0.0 ? 1 : 0);
      return metric_accuracy(pred_cls, labels);
    }
  }
  throw std::logic_error("eval_split: unreachable");
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&t0]() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
  };

  Pipeline p = build_pipeline(cfg);
  if (p.train_idx.empty() || p.valid_idx.empty() || p.test_idx.empty())
    throw ConfigError("data.num_instances: splits are empty at this size");

  RunResult out;
  out.config = cfg;
  const std::string hash = cfg.hash();

  out.model = Model::build(p.mcfg, p.variant, p.task.feature_dim, p.task.out_dim,
                           p.data.directed, 0, cfg.seed);
  Model& model = out.model;

  AdamConfig adam;
  adam.eps = cfg.training.adam_eps;
  adam.beta1 = cfg.training.adam_beta1;
  adam.beta2 = cfg.training.adam_beta2;
  adam.weight_decay = cfg.training.weight_decay;
  adam.clip_norm = cfg.training.clip_norm;
  TrainState state = TrainState::init(model.params);
  LrSchedule sched{cfg.training.peak_lr, cfg.training.warmup_steps, cfg.training.max_steps};

  Rng order_rng = make_rng(cfg.seed, "train_order");
  Rng dropout_rng = make_rng(cfg.seed, "dropout");
  Rng aug_rng = make_rng(cfg.seed, "augment");
  Rng sample_rng = make_rng(cfg.seed, "train_sample");

  std::vector<int> order = p.train_idx;
  order_rng.shuffle(order);
  size_t cursor = 0;

  auto emit = [&](long step, const std::string& split, double value) {
    out.records.push_back(ResultRecord{hash, cfg.variant, cfg.task, cfg.size, cfg.seed, step, split,
                                       to_string(p.metric), value, wall_ms()});
  };

  const bool lower = lower_is_better(p.metric);
  bool stopped = false;
  long step = 0;
  while (step < cfg.training.max_steps && !stopped) {
    ++step;
    Batch batch;
    batch.n_pad = p.n_pad;
    for (int b = 0; b < cfg.training.batch_size; ++b) {
      if (cursor >= order.size()) {
        order_rng.shuffle(order);
        cursor = 0;
      }
      const int idx = order[cursor++];
      if (p.task.level == TaskLevel::Graph)
        batch.add(&p.graph_instances[idx]);
      else
        batch.add_owned(sample_train_instance(p, idx, sample_rng));
    }

    Tape tape;
    auto ids = model.bind(tape);
    NodeId total = -1;
    for (const Instance* inst : batch.items) {
      const ReadoutKind readout =
          inst->target_index >= 0 ? ReadoutKind::TargetNode : ReadoutKind::MaskedMean;
      NodeId pred = model.forward(tape, ids, *inst, readout, true, &dropout_rng, &aug_rng);
      NodeId li = loss_node(tape, p.task.loss, pred, Matrix{{inst->target}});
      total = total < 0 ? li : tape.add(total, li);
    }
    NodeId loss = tape.scale(total, 1.0 / static_cast<double>(batch.size()));
    auto grad_map = tape.backward(loss);
    std::vector<Matrix> grads;
    grads.reserve(ids.size());
    for (NodeId id : ids) grads.push_back(std::move(grad_map.at(id)));
    adam_step(state, model.params, grads, adam, lr_at(step, sched));

    const bool last = step == cfg.training.max_steps;
    if (step % cfg.training.eval_interval == 0 || last) {
      const double valid = eval_split(p, model, p.valid_idx);
      emit(step, "valid", valid);
      out.final_valid_metric = valid;
      out.final_step = step;
      if (cfg.training.early_stop_metric_value) {
        const double thr = *cfg.training.early_stop_metric_value;
        if (lower ? valid < thr : valid > thr) stopped = true;
      }
    }
  }
  if (out.final_step != step) {  // ensure a final valid row exists
    const double valid = eval_split(p, model, p.valid_idx);
    emit(step, "valid", valid);
    out.final_valid_metric = valid;
    out.final_step = step;
  }
  out.final_test_metric = eval_split(p, model, p.test_idx);
  emit(out.final_step, "test", out.final_test_metric);
  return out;
}

// ---------------------------------------------------------------------------
// checkpoints
// ---------------------------------------------------------------------------

void save_params_json(const std::string& path, const Model& model) {
  json doc;
  doc["names"] = model.names;
  json values = json::object();
  for (size_t i = 0; i < model.params.size(); ++i) {
    const Matrix& m = model.params[i];
    values[model.names[i]] = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.vec()}};
  }
  doc["values"] = std::move(values);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump() << "\n";
}

void load_params_json(const std::string& path, Model& model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc = json::parse(in);
  for (size_t i = 0; i < model.names.size(); ++i) {
    const json& jm = doc.at("values").at(model.names[i]);
    Matrix m(jm.at("rows").get<int>(), jm.at("cols").get<int>(),
             jm.at("data").get<std::vector<double>>());
    if (!m.same_shape(model.params[i]))
      throw std::runtime_error("checkpoint: shape mismatch for " + model.names[i]);
    model.params[i] = std::move(m);
  }
}

RunResult run_train(const ExperimentConfig& cfg, const std::string& out_dir) {
  RunResult res = run_experiment(cfg);
  std::filesystem::create_directories(out_dir);
  write_results_csv(out_dir + "/results.csv", res.records, /*append=*/true);

  json manifest;
  manifest["config"] = json::parse(cfg.to_json_text());
  manifest["config_hash"] = cfg.hash();
  manifest["final_step"] = res.final_step;
  manifest["final_valid_metric"] = res.final_valid_metric;
  manifest["final_test_metric"] = res.final_test_metric;
  std::ofstream mf(out_dir + "/manifest.json");
  if (!mf) throw std::runtime_error("cannot write manifest.json");
  mf << manifest.dump(1) << "\n";

  save_params_json(out_dir + "/params.json", res.model);
  return res;
}

ResultRecord evaluate_checkpoint(const std::string& checkpoint_dir, const std::string& split) {
  if (split != "train" && split != "valid" && split != "test")
    throw ConfigError("split: must be train, valid, or test");
  std::ifstream mf(checkpoint_dir + "/manifest.json");
  if (!mf) throw std::runtime_error("cannot open " + checkpoint_dir + "/manifest.json");
  json manifest = json::parse(mf);
  ExperimentConfig cfg = ExperimentConfig::from_json_text(manifest.at("config").dump());

  Pipeline p = build_pipeline(cfg);
  Model model = Model::build(p.mcfg, p.variant, p.task.feature_dim, p.task.out_dim,
                             p.data.directed, 0, cfg.seed);
  load_params_json(checkpoint_dir + "/params.json", model);

  const std::vector<int>& idx =
      split == "train" ? p.train_idx : split == "valid" ? p.valid_idx : p.test_idx;
  if (p.task.level == TaskLevel::Node && split == "train") {
    // train-split node instances have no cached eval subgraphs; sample them
    // deterministically here
    for (int i : idx) {
      const auto [gi, v] = p.node_map[i];
      Rng srng = make_rng(cfg.seed, "eval_sample", i);
      Subgraph sub = shadow_khop_sample(p.data.graphs[gi], v, cfg.sampler.max_hop,
                                        cfg.sampler.max_nbrs, srng);
      p.eval_cache.emplace_back(
          i, make_instance(std::move(sub.graph), p.variant, p.mcfg, p.n_pad, sub.target_index,
                           (*p.data.graphs[gi].node_labels())[v]));
    }
  }
  ResultRecord rec;
  rec.config_hash = cfg.hash();
  rec.variant = cfg.variant;
  rec.task = cfg.task;
  rec.size = cfg.size;
  rec.seed = cfg.seed;
  rec.step = manifest.at("final_step").get<long>();
  rec.split = split;
  rec.metric = to_string(p.metric);
  rec.value = eval_split(p, model, idx);
  rec.wall_ms = 0;
  return rec;
}

}  // namespace gtx
