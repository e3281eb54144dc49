#pragma once

#include <vector>

#include "bnprune/groups.hpp"
#include "bnprune/network.hpp"
#include "bnprune/spikeslab.hpp"

namespace bnprune {

struct SelectionReport {
  std::vector<int> selected;  // 1-based, ascending
  double fdr = 0.0;           // |selected \ truth| / |selected|, 0 when none selected
  double fndr = 0.0;          // |truth \ selected| / (p - |selected|), 0 when all selected
  std::size_t s_hat = 0;
};

SelectionReport selection_metrics(const std::vector<int>& selected,
                                  const std::vector<int>& truth, std::size_t p);

// Variables kept by the hard mask: 1-based input units of the first layer
// whose input-unit group is still alive.
std::vector<int> selected_variables(const ParamLayout& layout,
                                    std::span<const std::uint8_t> alive);

// Posterior snapshot collection for ensembled prediction.
struct SnapshotEnsemble {
  std::vector<std::vector<double>> members;  // effective parameter vectors
  std::vector<std::int64_t> epochs;
  std::vector<int> cycles;
};

// Mean of member predictions (probabilities for the logistic head).
void ensemble_predict(const NetworkSpec& spec, const ParamLayout& layout,
                      const SnapshotEnsemble& ens, const Batch& batch,
                      std::span<double> pred_out);

struct PredictiveMetrics {
  double mse = 0.0;       // regression head
  double accuracy = 0.0;  // logistic head, threshold 0.5
};

PredictiveMetrics predictive_metrics(OutputKind kind, std::span<const double> pred,
                                     std::span<const double> target);

}  // namespace bnprune
