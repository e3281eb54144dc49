#include "bnprune/groups.hpp"

namespace bnprune {

namespace {

void append_input_groups(const ParamLayout& layout, std::vector<Group>& out) {
  for (std::size_t l = 0; l < layout.layers.size(); ++l) {
    const LayerLayout& ll = layout.layers[l];
    for (int j = 0; j < ll.fan_in; ++j) {
      Group g;
      g.kind = GroupKind::input_unit;
      g.layer = static_cast<int>(l);
      g.unit = j;
      g.members.reserve(static_cast<std::size_t>(ll.fan_out));
      for (int o = 0; o < ll.fan_out; ++o) {
        g.members.push_back(static_cast<std::uint32_t>(
            ll.weight_offset + static_cast<std::size_t>(o) * ll.fan_in + j));
      }
      out.push_back(std::move(g));
    }
  }
}

void append_output_groups(const ParamLayout& layout, std::vector<Group>& out) {
  for (std::size_t l = 0; l < layout.layers.size(); ++l) {
    const LayerLayout& ll = layout.layers[l];
    for (int o = 0; o < ll.fan_out; ++o) {
      Group g;
      g.kind = GroupKind::output_unit;
      g.layer = static_cast<int>(l);
      g.unit = o;
      g.members.reserve(static_cast<std::size_t>(ll.fan_in));
      const std::size_t row = ll.weight_offset + static_cast<std::size_t>(o) * ll.fan_in;
      for (int i = 0; i < ll.fan_in; ++i) {
        g.members.push_back(static_cast<std::uint32_t>(row + i));
      }
      out.push_back(std::move(g));
    }
  }
}

}  // namespace

GroupPartition group_partition(const NetworkSpec& spec, const ParamLayout& layout,
                               GroupScheme scheme) {
  spec.validate();
  GroupPartition part;
  part.scheme = scheme;
  if (scheme == GroupScheme::input || scheme == GroupScheme::both) {
    append_input_groups(layout, part.groups);
  }
  if (scheme == GroupScheme::output || scheme == GroupScheme::both) {
    append_output_groups(layout, part.groups);
  }
  return part;
}

GroupPartition custom_partition(const ParamLayout& layout, std::vector<Group> groups) {
  for (const Group& g : groups) {
    if (g.members.empty()) throw SpecError("empty group");
    for (std::uint32_t idx : g.members) {
      if (idx >= layout.size) throw SpecError("group member out of range");
      if (layout.is_bias(idx)) throw SpecError("bias parameters cannot be grouped");
    }
  }
  GroupPartition part;
  part.scheme = GroupScheme::both;
  part.groups = std::move(groups);
  return part;
}

}  // namespace bnprune
