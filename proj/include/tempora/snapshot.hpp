#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tempora/time_value.hpp"

namespace tempora {

// Logical identity of a successor-forest node: the labelled edge it stands
// for, named by the edge's lower endpoint.  Path structures use the edge
// position as the owner id.
struct FNodeKey {
  VertexId owner = 0;
  TemporalLabel label;

  friend constexpr bool operator==(const FNodeKey&, const FNodeKey&) = default;
  friend constexpr auto operator<=>(const FNodeKey& a, const FNodeKey& b) {
    if (auto c = a.owner <=> b.owner; c != 0) return c;
    return a.label <=> b.label;
  }
};

struct SnapshotEntry {
  FNodeKey key;
  std::optional<FNodeKey> parent;
  int weight = 0;  // 0 = red (same block), 1 = blue (block change)
};

// Logical state of one successor forest, as reported by a structure.  Node
// entries are sorted by key; heads are present only for latency-aware
// structures and list each block's head set in block order.
struct StructureSnapshot {
  std::vector<SnapshotEntry> nodes;
  std::map<VertexId, std::vector<FNodeKey>> heads;
  bool latency = false;
};

}  // namespace tempora
