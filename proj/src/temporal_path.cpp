#include "tempora/temporal_path.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace tempora {

namespace {

using NodeId = DynamicForest::NodeId;

// Smallest label >= t, treating dictionaries of plain integers.
std::optional<std::pair<std::int64_t, NodeId>> label_succ(
    const OrderedIndex<std::int64_t, NodeId>& dict, TimeValue t) {
  if (t.is_pos_inf()) return std::nullopt;
  std::optional<OrderedIndex<std::int64_t, NodeId>::Entry> e;
  if (t.is_neg_inf()) {
    e = dict.first();
  } else {
    e = dict.succ(t.value(), /*strict=*/false);
  }
  if (!e) return std::nullopt;
  return std::make_pair(e->key, e->value);
}

}  // namespace

std::optional<TemporalPath::Sigma> TemporalPath::CopyState::sigma(
    std::size_t edge, std::int64_t label) const {
  if (!dict[edge].contains(label)) {
    throw std::invalid_argument("sigma: no such node");
  }
  auto up = dict[edge].succ(label, /*strict=*/true);
  if (edge + 1 == dict.size()) {
    if (!up) return std::nullopt;
    return Sigma{edge, up->key, 0};
  }
  auto over = dict[edge + 1].succ(label, /*strict=*/false);
  if (!up && !over) return std::nullopt;
  // Treating an absent successor as +inf: red wins ties.
  if (up && (!over || up->key <= over->key)) return Sigma{edge, up->key, 0};
  return Sigma{edge + 1, over->key, 1};
}

void TemporalPath::CopyState::detach(NodeId n) {
  NodeInfo& ni = info[n];
  if (ni.parent == DynamicForest::kNone) return;
  forest.cut(n);
  ++counters.forest_ops;
  info[ni.parent].child[ni.weight] = DynamicForest::kNone;
  ni.parent = DynamicForest::kNone;
}

void TemporalPath::CopyState::attach(NodeId n, NodeId p, int weight) {
  NodeInfo& ni = info[n];
  if (ni.parent != DynamicForest::kNone) {
    throw std::logic_error("attach: node already has a parent");
  }
  if (info[p].child[weight] != DynamicForest::kNone) {
    throw std::logic_error("attach: child slot occupied");
  }
  forest.link(n, p, weight);
  ++counters.forest_ops;
  ni.parent = p;
  ni.weight = weight;
  info[p].child[weight] = n;
}

void TemporalPath::CopyState::fix_parent(std::size_t edge,
                                         std::int64_t label) {
  ++counters.fix_parent_calls;
  NodeId n = *dict[edge].find(label);
  NodeId old_parent = info[n].parent;
  int old_weight = info[n].weight;
  detach(n);
  auto s = sigma(edge, label);
  if (s) {
    attach(n, *dict[s->edge].find(s->label), s->weight);
  }
  bool changed = s ? (info[n].parent != old_parent || s->weight != old_weight ||
                      old_parent == DynamicForest::kNone)
                   : (old_parent != DynamicForest::kNone);
  if (changed) ++counters.rewires;
}

void TemporalPath::CopyState::add_label(std::size_t edge,
                                        std::int64_t label) {
  NodeId n = forest.add_node();
  ++counters.forest_ops;
  if (n >= info.size()) info.resize(n + 1);
  info[n] = NodeInfo{edge, label, DynamicForest::kNone, 0,
                     {DynamicForest::kNone, DynamicForest::kNone}};
  dict[edge].insert(label, n);
  // The predecessor fixes run before the new node's so that no red child
  // slot is transiently claimed twice; the final pointers do not depend on
  // this order.
  if (edge >= 1) {
    if (auto p = dict[edge - 1].pred(label, /*strict=*/false)) {
      fix_parent(edge - 1, p->key);
    }
  }
  if (auto q = dict[edge].pred(label, /*strict=*/true)) {
    fix_parent(edge, q->key);
  }
  fix_parent(edge, label);
}

void TemporalPath::CopyState::delete_label(std::size_t edge,
                                           std::int64_t label) {
  NodeId n = *dict[edge].find(label);
  detach(n);
  for (int s = 0; s < 2; ++s) {
    NodeId c = info[n].child[s];
    if (c != DynamicForest::kNone) detach(c);
  }
  forest.remove_node(n);
  ++counters.forest_ops;
  dict[edge].erase(label);
  if (edge >= 1) {
    if (auto p = dict[edge - 1].pred(label, /*strict=*/false)) {
      fix_parent(edge - 1, p->key);
    }
  }
  if (auto q = dict[edge].pred(label, /*strict=*/true)) {
    fix_parent(edge, q->key);
  }
}

TimeValue TemporalPath::CopyState::ea(std::size_t i, std::size_t j,
                                      TimeValue t) {
  // Rightward only: i < j as vertex positions of this copy.
  auto start = label_succ(dict[i], t);
  if (!start) return TimeValue::pos_inf();
  std::uint64_t need = j - i - 1;  // blue edges to cross
  auto anc = forest.level_ancestor(start->second, need);
  if (!anc) return TimeValue::pos_inf();
  const NodeInfo& ni = info[*anc];
  if (ni.edge != j - 1) {
    throw std::logic_error("ea: level ancestor landed on a wrong edge");
  }
  return TimeValue::finite(ni.label);
}

TemporalPath::TemporalPath(
    const std::vector<std::vector<std::int64_t>>& labels)
    : edge_count_(labels.size()) {
  for (int c = 0; c < 4; ++c) copies_[c].dict.resize(edge_count_);
  for (std::size_t e = 0; e < labels.size(); ++e) {
    std::set<std::int64_t> seen;
    for (std::int64_t l : labels[e]) {
      check_label_range(l, "TemporalPath");
      if (!seen.insert(l).second) {
        throw std::invalid_argument("TemporalPath: duplicate label");
      }
    }
  }
  for (std::size_t e = 0; e < labels.size(); ++e) {
    for (std::int64_t l : labels[e]) apply_add(e, l);
  }
  last_update_ = UpdateCounters{};
}

std::size_t TemporalPath::copy_edge(Copy c, std::size_t e) const {
  return reversed(c) ? edge_count_ - 1 - e : e;
}

void TemporalPath::apply_add(std::size_t edge, std::int64_t label) {
  UpdateCounters before[4];
  for (int c = 0; c < 4; ++c) before[c] = copies_[c].counters;
  for (int c = 0; c < 4; ++c) {
    Copy cc = static_cast<Copy>(c);
    copies_[c].add_label(copy_edge(cc, edge), negated(cc) ? -label : label);
  }
  ++label_count_;
  last_update_ = UpdateCounters{};
  for (int c = 0; c < 4; ++c) {
    UpdateCounters d = copies_[c].counters - before[c];
    last_update_.fix_parent_calls =
        std::max(last_update_.fix_parent_calls, d.fix_parent_calls);
    last_update_.rewires = std::max(last_update_.rewires, d.rewires);
    last_update_.forest_ops = std::max(last_update_.forest_ops, d.forest_ops);
  }
}

void TemporalPath::add_label(std::size_t edge, std::int64_t label) {
  if (edge >= edge_count_) {
    throw std::invalid_argument("add_label: no such edge");
  }
  check_label_range(label, "add_label");
  if (copies_[0].dict[edge].contains(label)) {
    throw std::invalid_argument("add_label: label already present");
  }
  apply_add(edge, label);
}

void TemporalPath::delete_label(std::size_t edge, std::int64_t label) {
  if (edge >= edge_count_) {
    throw std::invalid_argument("delete_label: no such edge");
  }
  if (!copies_[0].dict[edge].contains(label)) {
    throw std::invalid_argument("delete_label: label not present");
  }
  UpdateCounters before[4];
  for (int c = 0; c < 4; ++c) before[c] = copies_[c].counters;
  for (int c = 0; c < 4; ++c) {
    Copy cc = static_cast<Copy>(c);
    copies_[c].delete_label(copy_edge(cc, edge), negated(cc) ? -label : label);
  }
  --label_count_;
  last_update_ = UpdateCounters{};
  for (int c = 0; c < 4; ++c) {
    UpdateCounters d = copies_[c].counters - before[c];
    last_update_.fix_parent_calls =
        std::max(last_update_.fix_parent_calls, d.fix_parent_calls);
    last_update_.rewires = std::max(last_update_.rewires, d.rewires);
    last_update_.forest_ops = std::max(last_update_.forest_ops, d.forest_ops);
  }
}

TimeValue TemporalPath::ea(std::size_t i, std::size_t j, TimeValue t) {
  std::size_t n = vertex_count();
  if (i >= n || j >= n) throw std::invalid_argument("ea: position out of range");
  if (i == j) return t;
  if (i < j) return copies_[idx(Copy::kFwd)].ea(i, j, t);
  return copies_[idx(Copy::kBwd)].ea(n - 1 - i, n - 1 - j, t);
}

TimeValue TemporalPath::ld(std::size_t i, std::size_t j, TimeValue t) {
  std::size_t n = vertex_count();
  if (i >= n || j >= n) throw std::invalid_argument("ld: position out of range");
  if (i == j) return t;
  // LD(i, j, t) = -EA(j, i, -t) on the negated instance.
  if (i < j) return -copies_[idx(Copy::kNegBwd)].ea(n - 1 - j, n - 1 - i, -t);
  return -copies_[idx(Copy::kNegFwd)].ea(j, i, -t);
}

std::optional<TemporalPath::Sigma> TemporalPath::sigma(
    Copy c, std::size_t edge, std::int64_t label) const {
  if (edge >= edge_count_) throw std::invalid_argument("sigma: no such edge");
  return copies_[idx(c)].sigma(edge, label);
}

void TemporalPath::fix_parent(Copy c, std::size_t edge, std::int64_t label) {
  if (edge >= edge_count_) {
    throw std::invalid_argument("fix_parent: no such edge");
  }
  if (!copies_[idx(c)].dict[edge].contains(label)) {
    throw std::invalid_argument("fix_parent: no such node");
  }
  copies_[idx(c)].fix_parent(edge, label);
}

StructureSnapshot TemporalPath::snapshot(Copy c) const {
  const CopyState& cs = copies_[idx(c)];
  StructureSnapshot snap;
  for (std::size_t e = 0; e < edge_count_; ++e) {
    cs.dict[e].for_each([&](std::int64_t l, NodeId n) {
      SnapshotEntry entry;
      entry.key = {static_cast<VertexId>(e), TemporalLabel::plain(l)};
      const CopyState::NodeInfo& ni = cs.info[n];
      if (ni.parent != DynamicForest::kNone) {
        const CopyState::NodeInfo& pi = cs.info[ni.parent];
        entry.parent = FNodeKey{static_cast<VertexId>(pi.edge),
                                TemporalLabel::plain(pi.label)};
        entry.weight = ni.weight;
      }
      snap.nodes.push_back(entry);
    });
  }
  return snap;
}

std::vector<std::vector<TemporalLabel>> TemporalPath::copy_labels(
    Copy c) const {
  std::vector<std::vector<TemporalLabel>> out(edge_count_);
  for (std::size_t e = 0; e < edge_count_; ++e) {
    copies_[idx(c)].dict[e].for_each([&](std::int64_t l, NodeId) {
      out[e].push_back(TemporalLabel::plain(l));
    });
  }
  return out;
}

}  // namespace tempora
