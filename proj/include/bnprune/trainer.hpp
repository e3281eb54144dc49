#pragma once

#include <functional>
#include <vector>

#include "bnprune/checkpoint.hpp"
#include "bnprune/config.hpp"
#include "bnprune/metrics.hpp"
#include "bnprune/optim.hpp"
#include "bnprune/simdata.hpp"
#include "bnprune/spikeslab.hpp"

namespace bnprune {

struct MetricsRecord {
  std::int64_t epoch = 0;
  double train_loss = 0.0;   // mean batch data loss over the epoch
  double test_metric = 0.0;  // mse or accuracy of the current effective params
  double lr = 0.0;           // learning rate at the epoch's last iteration
  double hard_sparsity = 0.0;
  double soft_sparsity = 0.0;
  int snapshots = 0;  // cumulative snapshot count
};

// Observation points for instrumented runs; either hook may be empty.
struct TrainHooks {
  std::function<void(std::int64_t t, std::span<const double> effective,
                     std::span<const double> dense, const MaskState& mask)>
      after_step;
  std::function<void(const MetricsRecord& rec, std::span<const double> dense,
                     const MaskState& mask)>
      after_epoch;
};

struct TrainResult {
  NetworkSpec spec;
  ParamLayout layout;
  std::vector<double> params;  // final dense parameters
  std::vector<double> rho;     // final dual scale state; empty for ngvi
  MaskState mask;
  SnapshotEnsemble snapshots;
  std::vector<MetricsRecord> metrics;
  SelectionReport selection;        // against truth when the data carries one
  PredictiveMetrics ensemble_test;  // snapshot-ensemble metric on the test set
  std::vector<int> truth;
  std::int64_t iterations = 0;
  std::uint64_t seed = 0;
  int example_id = 0;
  std::size_t test_rows = 0;

  Checkpoint to_checkpoint() const;
};

struct LoadedData {
  SimDataset train, test;
  std::vector<int> truth;
};

// Materialize cfg's data source: benchmark generator or csv (first
// data.n_train rows train, remainder test).
LoadedData load_data(const RunConfig& cfg);

// Full training loop on explicit data; cfg.batch must not exceed train.n.
TrainResult train_on(const RunConfig& cfg, const SimDataset& train,
                     const SimDataset& test, std::vector<int> truth,
                     const TrainHooks* hooks = nullptr);

// load_data + train_on.
TrainResult train_run(const RunConfig& cfg, const TrainHooks* hooks = nullptr);

}  // namespace bnprune
