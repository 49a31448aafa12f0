#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gtx {

enum class MetricKind { Mae, RocAuc, AveragePrecision, Accuracy };

MetricKind metric_from_string(const std::string& s);
std::string to_string(MetricKind m);
bool lower_is_better(MetricKind m);

/// Thrown when a metric is undefined on the given inputs (e.g. single-class
/// labels for ranking metrics).
class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double metric_mae(const std::vector<double>& pred, const std::vector<double>& target);

/// Probability that a uniformly random positive outranks a uniformly random
/// negative; ties count one half.
double metric_roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Area under precision-recall via the step summation over the
/// descending-score ranking; ties broken deterministically by index.
double metric_average_precision(const std::vector<double>& scores, const std::vector<int>& labels);

double metric_accuracy(const std::vector<int>& predicted, const std::vector<int>& labels);

}  // namespace gtx
