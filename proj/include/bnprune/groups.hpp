#pragma once

#include <cstdint>
#include <vector>

#include "bnprune/network.hpp"

namespace bnprune {

enum class GroupKind { input_unit, output_unit, kernel };
enum class GroupScheme { input, output, both };

// One selection/pruning unit: the weight indices tied to a single input or
// output unit of a layer (or an arbitrary kernel-style index set).
struct Group {
  GroupKind kind = GroupKind::kernel;
  int layer = -1;
  int unit = -1;
  std::vector<std::uint32_t> members;  // flat parameter indices, weights only
};

struct GroupPartition {
  GroupScheme scheme = GroupScheme::input;
  std::vector<Group> groups;

  std::size_t n_groups() const { return groups.size(); }
};

// Unit-based groups over every layer. scheme input: one group per input unit
// per layer (size fan_out); scheme output: one per output unit (size fan_in);
// scheme both: the input groups followed by the output groups. Biases are
// never members.
GroupPartition group_partition(const NetworkSpec& spec, const ParamLayout& layout,
                               GroupScheme scheme);

// Arbitrary groups (kernel-style); validates indices against the layout and
// rejects bias members.
GroupPartition custom_partition(const ParamLayout& layout, std::vector<Group> groups);

}  // namespace bnprune
