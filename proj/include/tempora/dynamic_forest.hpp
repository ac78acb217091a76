#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace tempora {

// Dynamic rooted forest over opaque node handles with {0,1} edge weights.
// Backed by a link-cut tree: preferred paths are splay trees ordered root
// first, and every node carries the weight of the edge to its real parent
// (0 for roots) plus the sum of those weights over its splay subtree.
// Prefix sums over an exposed path answer distance and weighted level
// ancestor queries; all operations are amortised O(log n).
//
// Handles are never reused within one forest's lifetime.
class DynamicForest {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kNone = static_cast<NodeId>(-1);

  struct Stats {
    std::uint64_t rotations = 0;
    std::uint64_t exposes = 0;
    std::uint64_t links = 0;
    std::uint64_t cuts = 0;
    std::uint64_t adds = 0;
    std::uint64_t removes = 0;
  };

  NodeId add_node();
  // The node must be isolated (no parent, no children).  Its handle becomes
  // permanently invalid.
  void remove_node(NodeId h);

  // child must be a root, parent must lie in a different tree.
  void link(NodeId child, NodeId parent, int weight);
  // Detaches child from its parent; child must not be a root.
  void cut(NodeId child);

  std::size_t node_count() const { return live_; }
  bool is_live(NodeId h) const {
    return h < nodes_.size() && nodes_[h].alive;
  }

  std::optional<NodeId> parent(NodeId h) const;
  std::size_t child_count(NodeId h) const;
  NodeId root(NodeId h);
  std::optional<NodeId> lca(NodeId a, NodeId b);
  // Weighted distance between two nodes of one tree.
  std::optional<std::uint64_t> distance(NodeId a, NodeId b);
  std::uint64_t distance_to_root(NodeId h);
  // Deepest ancestor of h (possibly h itself) whose weighted distance from
  // h is at least min_weight; nullopt if even the root is too close.
  std::optional<NodeId> level_ancestor(NodeId h, std::uint64_t min_weight);

  const Stats& stats() const { return stats_; }
  std::uint64_t mutation_count() const {
    return stats_.links + stats_.cuts + stats_.adds + stats_.removes;
  }

 private:
  struct Node {
    NodeId ch[2] = {kNone, kNone};  // splay children
    NodeId sp = kNone;              // splay parent, or path parent at a splay root
    NodeId real_parent = kNone;
    std::uint32_t child_count = 0;
    std::uint64_t agg = 0;          // sum of wpar over the splay subtree
    std::uint8_t wpar = 0;          // weight of the edge to real_parent
    bool alive = false;
  };

  void check_live(NodeId h, const char* what) const;
  bool is_splay_root(NodeId x) const;
  void update(NodeId x);
  void rotate(NodeId x);
  void splay(NodeId x);
  NodeId expose(NodeId x);

  std::vector<Node> nodes_;
  std::size_t live_ = 0;
  Stats stats_;
};

}  // namespace tempora
