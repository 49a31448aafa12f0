#include "graphtx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gtx {

MetricKind metric_from_string(const std::string& s) {
  if (s == "mae") return MetricKind::Mae;
  if (s == "roc_auc") return MetricKind::RocAuc;
  if (s == "ap") return MetricKind::AveragePrecision;
  if (s == "accuracy") return MetricKind::Accuracy;
  throw std::invalid_argument("unknown metric: " + s);
}

std::string to_string(MetricKind m) {
  switch (m) {
    case MetricKind::Mae: return "mae";
    case MetricKind::RocAuc: return "roc_auc";
    case MetricKind::AveragePrecision: return "ap";
    case MetricKind::Accuracy: return "accuracy";
  }
  return "?";
}

bool lower_is_better(MetricKind m) { return m == MetricKind::Mae; }

double metric_mae(const std::vector<double>& pred, const std::vector<double>& target) {
  if (pred.size() != target.size() || pred.empty())
    throw std::invalid_argument("metric_mae: size mismatch or empty");
  double s = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) s += std::fabs(pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

namespace {

void check_two_classes(const std::vector<int>& labels) {
  const long pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<long>(labels.size()))
    throw MetricError("ranking metric undefined: labels contain a single class");
}

}  // namespace

double metric_roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("metric_roc_auc: size mismatch or empty");
  check_two_classes(labels);
  // rank-sum with average ranks over ties == pairwise count with half-ties
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](size_t a, size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(scores.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  long pos = 0;
  for (size_t k = 0; k < labels.size(); ++k)
    if (labels[k] == 1) {
      pos_rank_sum += rank[k];
      ++pos;
    }
  const long neg = static_cast<long>(labels.size()) - pos;
  return (pos_rank_sum - 0.5 * pos * (pos + 1.0)) / (static_cast<double>(pos) * neg);
}

double metric_average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("metric_average_precision: size mismatch or empty");
  check_two_classes(labels);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&scores](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // deterministic tie-break by index
  });
  const double total_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  double tp = 0.0, ap = 0.0, prev_recall = 0.0;
  for (size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]] == 1) {
      tp += 1.0;
      const double recall = tp / total_pos;
      const double precision = tp / static_cast<double>(k + 1);
      ap += (recall - prev_recall) * precision;
      prev_recall = recall;
    }
  }
  return ap;
}

double metric_accuracy(const std::vector<int>& predicted, const std::vector<int>& labels) {
  if (predicted.size() != labels.size() || predicted.empty())
    throw std::invalid_argument("metric_accuracy: size mismatch or empty");
  long hit = 0;
  for (size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == labels[i]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(predicted.size());
}

}  // namespace gtx
