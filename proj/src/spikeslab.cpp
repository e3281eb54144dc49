#include "bnprune/spikeslab.hpp"

#include <cmath>

namespace bnprune {

namespace {

double group_mean_square(std::span<const double> params, const Group& g) {
  double s = 0.0;
  for (std::uint32_t idx : g.members) {
    const double w = params[idx];
    s += w * w;
  }
  return s / static_cast<double>(g.members.size());
}

}  // namespace

void SpikeSlabConfig::validate() const {
  if (!(delta0 > delta1) || !(delta1 > 0.0)) {
    throw SpecError("spike/slab precisions need delta0 > delta1 > 0");
  }
  if (lambda1 < 0.0 || lambda2 < 0.0) throw SpecError("thresholds must be nonnegative");
}

double lambda1_threshold(double delta0, double delta1, double prior_p, int group_size) {
  if (!(delta0 > delta1) || !(delta1 > 0.0)) {
    throw SpecError("spike/slab precisions need delta0 > delta1 > 0");
  }
  if (!(prior_p > 0.0 && prior_p < 1.0)) throw SpecError("prior weight must be in (0,1)");
  if (group_size < 1) throw SpecError("group size must be positive");
  const double log_odds = std::log(prior_p / (1.0 - prior_p));
  return (std::log(delta0 / delta1) + 2.0 * log_odds / group_size) / (delta0 - delta1);
}

void em_update_softmask(std::span<const double> params, const GroupPartition& part,
                        double lambda1, std::span<std::uint8_t> soft) {
  for (std::size_t gi = 0; gi < part.groups.size(); ++gi) {
    soft[gi] = group_mean_square(params, part.groups[gi]) <= lambda1 ? 0 : 1;
  }
}

std::vector<double> decay_vector(const ParamLayout& layout, const GroupPartition& part,
                                 std::span<const std::uint8_t> soft, double delta0,
                                 double delta1, double n_data) {
  std::vector<double> decay(layout.size, delta1 / n_data);
  const double spike = delta0 / n_data;
  for (std::size_t gi = 0; gi < part.groups.size(); ++gi) {
    if (soft[gi] != 0) continue;
    for (std::uint32_t idx : part.groups[gi].members) decay[idx] = spike;
  }
  return decay;
}

void prune_concentration(std::span<const double> params, const GroupPartition& part,
                         double lambda2, std::span<std::uint8_t> keep) {
  for (std::size_t gi = 0; gi < part.groups.size(); ++gi) {
    const Group& g = part.groups[gi];
    if (g.members.size() == 1) {
      keep[gi] = std::abs(params[g.members[0]]) < lambda2 ? 0 : 1;
      continue;
    }
    double lo = std::abs(params[g.members[0]]);
    double hi = lo;
    for (std::size_t i = 1; i < g.members.size(); ++i) {
      const double a = std::abs(params[g.members[i]]);
      lo = a < lo ? a : lo;
      hi = a > hi ? a : hi;
    }
    keep[gi] = (hi - lo) < lambda2 ? 0 : 1;
  }
}

void prune_l2(std::span<const double> params, const GroupPartition& part, double lambda1,
              std::span<std::uint8_t> keep) {
  for (std::size_t gi = 0; gi < part.groups.size(); ++gi) {
    keep[gi] = group_mean_square(params, part.groups[gi]) <= lambda1 ? 0 : 1;
  }
}

void apply_hard_mask(const GroupPartition& part, std::span<const std::uint8_t> keep,
                     std::span<std::uint8_t> alive) {
  std::fill(alive.begin(), alive.end(), 1);
  for (std::size_t gi = 0; gi < part.groups.size(); ++gi) {
    if (keep[gi] != 0) continue;
    for (std::uint32_t idx : part.groups[gi].members) alive[idx] = 0;
  }
}

void apply_mask_semantics(std::span<double> dense, std::span<const std::uint8_t> alive,
                          PruneMode mode, std::span<double> effective) {
  if (mode == PruneMode::dfp) {
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if (alive[i] == 0) dense[i] = 0.0;
      effective[i] = dense[i];
    }
  } else {
    for (std::size_t i = 0; i < dense.size(); ++i) {
      effective[i] = alive[i] != 0 ? dense[i] : 0.0;
    }
  }
}

SparsityMetrics sparsity_metrics(const ParamLayout& layout, const GroupPartition& em_part,
                                 std::span<const std::uint8_t> soft,
                                 std::span<const std::uint8_t> alive) {
  SparsityMetrics out;
  const std::size_t n_weights = layout.n_weights();
  if (n_weights == 0) return out;

  std::size_t hard_pruned = 0;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    if (alive[i] == 0 && !layout.is_bias(i)) ++hard_pruned;
  }
  std::size_t soft_spiked = 0;
  for (std::size_t gi = 0; gi < em_part.groups.size(); ++gi) {
    if (soft[gi] == 0) soft_spiked += em_part.groups[gi].members.size();
  }
  out.hard_sparsity = static_cast<double>(hard_pruned) / static_cast<double>(n_weights);
  out.soft_sparsity = static_cast<double>(soft_spiked) / static_cast<double>(n_weights);
  return out;
}

}  // namespace bnprune
