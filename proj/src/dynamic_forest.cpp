#include "tempora/dynamic_forest.hpp"

#include <stdexcept>
#include <string>

namespace tempora {

void DynamicForest::check_live(NodeId h, const char* what) const {
  if (!is_live(h)) {
    throw std::invalid_argument(std::string(what) + ": invalid node handle " +
                                std::to_string(h));
  }
}

bool DynamicForest::is_splay_root(NodeId x) const {
  NodeId p = nodes_[x].sp;
  return p == kNone || (nodes_[p].ch[0] != x && nodes_[p].ch[1] != x);
}

void DynamicForest::update(NodeId x) {
  Node& n = nodes_[x];
  n.agg = n.wpar;
  if (n.ch[0] != kNone) n.agg += nodes_[n.ch[0]].agg;
  if (n.ch[1] != kNone) n.agg += nodes_[n.ch[1]].agg;
}

void DynamicForest::rotate(NodeId x) {
  NodeId p = nodes_[x].sp;
  NodeId g = nodes_[p].sp;
  bool p_root = is_splay_root(p);
  int side = nodes_[p].ch[1] == x ? 1 : 0;
  NodeId b = nodes_[x].ch[1 - side];

  nodes_[p].ch[side] = b;
  if (b != kNone) nodes_[b].sp = p;
  nodes_[x].ch[1 - side] = p;
  nodes_[p].sp = x;
  nodes_[x].sp = g;
  if (!p_root) nodes_[g].ch[nodes_[g].ch[1] == p ? 1 : 0] = x;

  update(p);
  update(x);
  ++stats_.rotations;
}

void DynamicForest::splay(NodeId x) {
  while (!is_splay_root(x)) {
    NodeId p = nodes_[x].sp;
    if (!is_splay_root(p)) {
      NodeId g = nodes_[p].sp;
      bool zigzig = (nodes_[g].ch[1] == p) == (nodes_[p].ch[1] == x);
      rotate(zigzig ? p : x);
    }
    rotate(x);
  }
}

DynamicForest::NodeId DynamicForest::expose(NodeId x) {
  ++stats_.exposes;
  NodeId last = kNone;
  for (NodeId y = x; y != kNone; y = nodes_[y].sp) {
    splay(y);
    nodes_[y].ch[1] = last;  // the dropped child keeps y as its path parent
    update(y);
    last = y;
  }
  splay(x);
  return last;
}

DynamicForest::NodeId DynamicForest::add_node() {
  NodeId h = static_cast<NodeId>(nodes_.size());
  nodes_.emplace_back();
  nodes_[h].alive = true;
  ++live_;
  ++stats_.adds;
  return h;
}

void DynamicForest::remove_node(NodeId h) {
  check_live(h, "remove_node");
  Node& n = nodes_[h];
  if (n.real_parent != kNone) {
    throw std::invalid_argument("remove_node: node has a parent");
  }
  if (n.child_count != 0) {
    throw std::invalid_argument("remove_node: node has children");
  }
  expose(h);
  // An isolated node's preferred path is just itself.
  n.alive = false;
  --live_;
  ++stats_.removes;
}

void DynamicForest::link(NodeId child, NodeId parent, int weight) {
  check_live(child, "link");
  check_live(parent, "link");
  if (weight != 0 && weight != 1) {
    throw std::invalid_argument("link: weight must be 0 or 1");
  }
  if (nodes_[child].real_parent != kNone) {
    throw std::invalid_argument("link: child is not a root");
  }
  if (root(parent) == child) {
    throw std::invalid_argument("link: endpoints share a tree");
  }
  expose(child);  // child is its tree's root, so its path is now {child}
  nodes_[child].wpar = static_cast<std::uint8_t>(weight);
  update(child);
  nodes_[child].sp = parent;
  nodes_[child].real_parent = parent;
  ++nodes_[parent].child_count;
  ++stats_.links;
}

void DynamicForest::cut(NodeId child) {
  check_live(child, "cut");
  NodeId p = nodes_[child].real_parent;
  if (p == kNone) throw std::invalid_argument("cut: node is a root");
  expose(child);
  // child is rightmost on the exposed path; everything to the left is the
  // strict ancestor chain.
  NodeId left = nodes_[child].ch[0];
  nodes_[child].ch[0] = kNone;
  nodes_[left].sp = kNone;
  nodes_[child].wpar = 0;
  update(child);
  nodes_[child].real_parent = kNone;
  --nodes_[p].child_count;
  ++stats_.cuts;
}

std::optional<DynamicForest::NodeId> DynamicForest::parent(NodeId h) const {
  check_live(h, "parent");
  NodeId p = nodes_[h].real_parent;
  if (p == kNone) return std::nullopt;
  return p;
}

std::size_t DynamicForest::child_count(NodeId h) const {
  check_live(h, "child_count");
  return nodes_[h].child_count;
}

DynamicForest::NodeId DynamicForest::root(NodeId h) {
  check_live(h, "root");
  expose(h);
  NodeId x = h;
  while (nodes_[x].ch[0] != kNone) x = nodes_[x].ch[0];
  splay(x);
  return x;
}

std::optional<DynamicForest::NodeId> DynamicForest::lca(NodeId a, NodeId b) {
  check_live(a, "lca");
  check_live(b, "lca");
  if (a == b) return a;
  if (root(a) != root(b)) return std::nullopt;
  expose(a);
  return expose(b);  // the last preferred-path top visited is the meet
}

std::uint64_t DynamicForest::distance_to_root(NodeId h) {
  check_live(h, "distance_to_root");
  expose(h);
  return nodes_[h].agg;
}

std::optional<std::uint64_t> DynamicForest::distance(NodeId a, NodeId b) {
  check_live(a, "distance");
  check_live(b, "distance");
  if (a == b) return 0;
  auto w = lca(a, b);
  if (!w) return std::nullopt;
  std::uint64_t da = distance_to_root(a);
  std::uint64_t db = distance_to_root(b);
  std::uint64_t dw = distance_to_root(*w);
  return da + db - 2 * dw;
}

std::optional<DynamicForest::NodeId> DynamicForest::level_ancestor(
    NodeId h, std::uint64_t min_weight) {
  check_live(h, "level_ancestor");
  expose(h);
  std::uint64_t total = nodes_[h].agg;
  if (total < min_weight) return std::nullopt;
  // Path nodes in splay order run root..h; an ancestor at weighted distance
  // >= w from h is exactly one whose prefix weight is <= total - w.  Prefix
  // weights are nondecreasing, so take the rightmost such node.
  std::uint64_t bound = total - min_weight;
  std::uint64_t acc = 0;
  NodeId best = kNone;
  NodeId cur = h;
  while (cur != kNone) {
    std::uint64_t left = nodes_[cur].ch[0] == kNone
                             ? 0
                             : nodes_[nodes_[cur].ch[0]].agg;
    std::uint64_t pref = acc + left + nodes_[cur].wpar;
    if (pref <= bound) {
      best = cur;
      acc = pref;
      cur = nodes_[cur].ch[1];
    } else {
      cur = nodes_[cur].ch[0];
    }
  }
  if (best != kNone) splay(best);
  return best == kNone ? std::nullopt : std::optional<NodeId>(best);
}

}  // namespace tempora
