#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bnprune/groups.hpp"
#include "bnprune/network.hpp"

namespace bnprune {

enum class PruneMode { dfp, dpf };
enum class PruneRule { concentration, l2 };

struct SpikeSlabConfig {
  double delta0 = 2500.0;  // spike precision (large)
  double delta1 = 25.0;    // slab precision (small)
  double lambda1 = 0.0;    // soft/EM threshold on group mean square
  double lambda2 = 0.0;    // hard threshold for the concentration rule
  PruneMode mode = PruneMode::dfp;
  PruneRule rule = PruneRule::l2;

  void validate() const;  // delta0 > delta1 > 0, lambda1 >= 0, lambda2 >= 0
};

// Closed-form EM threshold on the group mean square:
//   [log(delta0/delta1) + (2/G) log(p/(1-p))] / (delta0 - delta1)
double lambda1_threshold(double delta0, double delta1, double prior_p, int group_size);

// Group goes to the spike iff mean(w^2) <= lambda1 (ties included). soft gets
// 1 for slab, 0 for spike, one entry per group.
void em_update_softmask(std::span<const double> params, const GroupPartition& part,
                        double lambda1, std::span<std::uint8_t> soft);

// Per-weight decay delta/N: spike-group members get delta0/N, slab members
// delta1/N, biases delta1/N.
std::vector<double> decay_vector(const ParamLayout& layout, const GroupPartition& part,
                                 std::span<const std::uint8_t> soft, double delta0,
                                 double delta1, double n_data);

// Hard-pruning scans; keep[i] = 1 means group i survives.
// Concentration rule: prune when max|w| - min|w| < lambda2 (strict), or for
// size-1 groups when |w| < lambda2.
void prune_concentration(std::span<const double> params, const GroupPartition& part,
                         double lambda2, std::span<std::uint8_t> keep);
// L2 rule: prune when mean(w^2) <= lambda1 (ties pruned, matching the EM
// spike assignment on the same groups).
void prune_l2(std::span<const double> params, const GroupPartition& part, double lambda1,
              std::span<std::uint8_t> keep);

// Per-group masks with the derived per-parameter alive view and the decay
// vector that feeds the optimizer.
struct MaskState {
  PruneMode mode = PruneMode::dfp;
  std::vector<std::uint8_t> soft;       // per em-partition group; 1 = slab
  std::vector<std::uint8_t> hard;       // per prune-partition group; 1 = keep
  std::vector<std::uint8_t> alive;      // per parameter; biases always 1
  std::vector<double> decay_raw;        // per parameter, delta0/delta1 values
};

// Recompute alive from per-group keep bits: a weight is pruned when any group
// containing it is pruned; untouched (bias or ungrouped) parameters stay alive.
void apply_hard_mask(const GroupPartition& part, std::span<const std::uint8_t> keep,
                     std::span<std::uint8_t> alive);

// Masked-parameter semantics. dfp: zero pruned coordinates of dense in place
// and mirror the result into effective. dpf: dense untouched; effective gets
// dense with pruned coordinates zeroed.
void apply_mask_semantics(std::span<double> dense, std::span<const std::uint8_t> alive,
                          PruneMode mode, std::span<double> effective);

// Fractions of non-bias weights that are hard-pruned / soft-spiked.
struct SparsityMetrics {
  double hard_sparsity = 0.0;
  double soft_sparsity = 0.0;
};
SparsityMetrics sparsity_metrics(const ParamLayout& layout, const GroupPartition& em_part,
                                 std::span<const std::uint8_t> soft,
                                 std::span<const std::uint8_t> alive);

}  // namespace bnprune
