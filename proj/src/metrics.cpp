#include "bnprune/metrics.hpp"

#include <algorithm>
#include <set>

namespace bnprune {

SelectionReport selection_metrics(const std::vector<int>& selected,
                                  const std::vector<int>& truth, std::size_t p) {
  SelectionReport rep;
  rep.selected = selected;
  std::sort(rep.selected.begin(), rep.selected.end());
  rep.s_hat = rep.selected.size();

  const std::set<int> truth_set(truth.begin(), truth.end());
  std::size_t false_sel = 0;
  for (int v : rep.selected) {
    if (!truth_set.contains(v)) ++false_sel;
  }
  const std::set<int> sel_set(rep.selected.begin(), rep.selected.end());
  std::size_t missed = 0;
  for (int v : truth_set) {
    if (!sel_set.contains(v)) ++missed;
  }

  rep.fdr = rep.s_hat == 0
                ? 0.0
                : static_cast<double>(false_sel) / static_cast<double>(rep.s_hat);
  const std::size_t complement = p - rep.s_hat;
  rep.fndr = complement == 0
                 ? 0.0
                 : static_cast<double>(missed) / static_cast<double>(complement);
  return rep;
}

std::vector<int> selected_variables(const ParamLayout& layout,
                                    std::span<const std::uint8_t> alive) {
  const LayerLayout& first = layout.layers.front();
  std::vector<int> vars;
  for (int j = 0; j < first.fan_in; ++j) {
    bool any_alive = false;
    for (int o = 0; o < first.fan_out && !any_alive; ++o) {
      const std::size_t idx =
          first.weight_offset + static_cast<std::size_t>(o) * first.fan_in + j;
      any_alive = alive[idx] != 0;
    }
    if (any_alive) vars.push_back(j + 1);
  }
  return vars;
}

void ensemble_predict(const NetworkSpec& spec, const ParamLayout& layout,
                      const SnapshotEnsemble& ens, const Batch& batch,
                      std::span<double> pred_out) {
  if (ens.members.empty()) throw SpecError("empty snapshot ensemble");
  std::fill(pred_out.begin(), pred_out.end(), 0.0);
  std::vector<double> pred(batch.n);
  NetScratch scratch;
  for (const std::vector<double>& params : ens.members) {
    forward(spec, layout, params, batch, pred, scratch);
    for (std::size_t i = 0; i < batch.n; ++i) pred_out[i] += pred[i];
  }
  const double inv = 1.0 / static_cast<double>(ens.members.size());
  for (std::size_t i = 0; i < batch.n; ++i) pred_out[i] *= inv;
}

PredictiveMetrics predictive_metrics(OutputKind kind, std::span<const double> pred,
                                     std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) {
    throw SpecError("prediction/target size mismatch");
  }
  PredictiveMetrics out;
  if (kind == OutputKind::regression) {
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double r = pred[i] - target[i];
      s += r * r;
    }
    out.mse = s / static_cast<double>(pred.size());
  } else {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double label = pred[i] > 0.5 ? 1.0 : 0.0;
      if (label == target[i]) ++hits;
    }
    out.accuracy = static_cast<double>(hits) / static_cast<double>(pred.size());
  }
  return out;
}

}  // namespace bnprune
