#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "graphtx/matrix.hpp"
#include "graphtx/tape.hpp"

namespace gtxtest {

/// Forward builder: receives leaf ids bound (in order) to the current
/// parameter values on a fresh tape, returns the scalar loss node. The same
/// builder serves the analytic pass and the central-difference oracle.
using ScalarFn = std::function<gtx::NodeId(gtx::Tape&, const std::vector<gtx::NodeId>&)>;

struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
};

/// Compares tape gradients against central finite differences (step h) over
/// every entry of every parameter. Relative error uses a floor so near-zero
/// gradients do not blow up the ratio.
inline GradCheckResult grad_check(const ScalarFn& fn, const std::vector<gtx::Matrix>& params,
                                  double h = 1e-5, double floor = 1e-3) {
  auto bind = [](gtx::Tape& t, const std::vector<gtx::Matrix>& vals) {
    std::vector<gtx::NodeId> ids;
    ids.reserve(vals.size());
    for (const auto& v : vals) ids.push_back(t.leaf(v));
    return ids;
  };

  gtx::Tape tape;
  std::vector<gtx::NodeId> ids = bind(tape, params);
  gtx::NodeId loss = fn(tape, ids);
  auto grads = tape.backward(loss);

  auto eval = [&](const std::vector<gtx::Matrix>& vals) {
    gtx::Tape t;
    std::vector<gtx::NodeId> vids = bind(t, vals);
    return t.value(fn(t, vids))(0, 0);
  };

  GradCheckResult res;
  for (size_t p = 0; p < params.size(); ++p) {
    const gtx::Matrix& analytic = grads.at(ids[p]);
    for (int i = 0; i < params[p].rows(); ++i) {
      for (int j = 0; j < params[p].cols(); ++j) {
        std::vector<gtx::Matrix> plus = params, minus = params;
        plus[p](i, j) += h;
        minus[p](i, j) -= h;
        const double fd = (eval(plus) - eval(minus)) / (2.0 * h);
        const double ad = analytic(i, j);
        const double rel = std::fabs(ad - fd) / std::max({std::fabs(ad), std::fabs(fd), floor});
        res.max_rel_err = std::max(res.max_rel_err, rel);
        ++res.checked;
      }
    }
  }
  return res;
}

}  // namespace gtxtest
