#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphtx/model.hpp"
#include "graphtx/optim.hpp"
#include "graphtx/tasks.hpp"

namespace gtx {

/// Invalid configuration; the message enumerates offending field paths.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Published training protocol values. These are the config defaults; the
/// exception is max_steps, whose published 1e6 is kept as the ceiling while
/// the desk-scale default is kDeskMaxSteps.
namespace protocol {
constexpr double kAttentionDropout = 0.1;
constexpr double kFfnDropout = 0.1;
constexpr long kMaxStepsCeiling = 1000000;
constexpr long kWarmupSteps = 40000;
constexpr double kPeakLr = 2e-4;
constexpr int kBatchSize = 256;
constexpr double kWeightDecay = 1e-3;
constexpr double kClipNorm = 5.0;
constexpr double kAdamEps = 1e-8;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.99;
inline constexpr const char* kLrDecay = "linear";
}  // namespace protocol

constexpr long kDeskMaxSteps = 3000;

struct TrainingConfig {
  double attention_dropout = protocol::kAttentionDropout;
  double ffn_dropout = protocol::kFfnDropout;
  long max_steps = kDeskMaxSteps;
  long warmup_steps = protocol::kWarmupSteps;
  double peak_lr = protocol::kPeakLr;
  int batch_size = protocol::kBatchSize;
  double weight_decay = protocol::kWeightDecay;
  double clip_norm = protocol::kClipNorm;
  double adam_eps = protocol::kAdamEps;
  double adam_beta1 = protocol::kAdamBeta1;
  double adam_beta2 = protocol::kAdamBeta2;
  std::string lr_decay = protocol::kLrDecay;
  long eval_interval = 500;
  /// Optional: stop once the valid metric passes this value (strictly better).
  std::optional<double> early_stop_metric_value;
};

struct SamplerConfig {
  int max_hop = 2;
  int max_nbrs = 10;
};

struct DataConfig {
  int num_instances = 200;
};

/// Optional desk-scale override of the size-tag dimensions (heads * head_dim
/// must equal d). The size tag is still recorded in results.
struct ModelOverride {
  int layers = 0;
  int d = 0;
  int d_f = 0;
  int heads = 0;
  int head_dim = 0;
};

struct ExperimentConfig {
  uint64_t seed = 0;
  std::string size = "small";
  std::string variant = "vanilla";
  std::string task;
  std::optional<std::string> metric;  // override for binary tasks: roc_auc | ap
  std::optional<ModelOverride> model;
  TrainingConfig training;
  SamplerConfig sampler;
  DataConfig data;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  /// Canonical resolved form (sorted keys); hash input and manifest body.
  std::string to_json_text() const;
  /// Throws ConfigError listing every invalid field path.
  void validate() const;
  std::string hash() const;
  MetricKind resolved_metric() const;
};

struct ResultRecord {
  std::string config_hash;
  std::string variant;
  std::string task;
  std::string size;
  uint64_t seed = 0;
  long step = 0;
  std::string split;
  std::string metric;
  double value = 0.0;
  long wall_ms = 0;
};

inline constexpr const char* kResultsCsvHeader =
    "config_hash,variant,task,size,seed,step,split,metric,value,wall_ms";

std::string format_csv_value(double v);  // 6 significant digits
std::string format_csv_row(const ResultRecord& r);
void write_results_csv(const std::string& path, const std::vector<ResultRecord>& records,
                       bool append = false);
std::vector<ResultRecord> load_results_csv(const std::string& path);

struct RunResult {
  ExperimentConfig config;
  std::vector<ResultRecord> records;
  Model model;
  long final_step = 0;
  double final_valid_metric = 0.0;
  double final_test_metric = 0.0;
};

/// Fully deterministic: a pure function of the config (including its seed),
/// wall_ms fields aside.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Runs and writes results.csv, manifest.json, and params.json to out_dir.
RunResult run_train(const ExperimentConfig& cfg, const std::string& out_dir);

/// Re-evaluates a saved checkpoint on the requested split ("train", "valid"
/// or "test"); dataset and split membership are rebuilt from the manifest.
ResultRecord evaluate_checkpoint(const std::string& checkpoint_dir, const std::string& split);

void save_params_json(const std::string& path, const Model& model);
void load_params_json(const std::string& path, Model& model);

/// Deterministic 80/10/10 split by instance-index hash: 0..7 train,
/// 8 valid, 9 test.
int split_bucket(int instance_index);

}  // namespace gtx
