#include "tempora/temporal_forest.hpp"

#include <stdexcept>
#include <string>

namespace tempora {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

const TemporalForest::VtxRec& TemporalForest::vtx(VertexId v,
                                                  const char* what) const {
  auto it = verts_.find(v);
  if (it == verts_.end()) {
    fail(std::string(what) + ": unknown vertex " + std::to_string(v));
  }
  return it->second;
}

VertexId TemporalForest::owner_of(NodeId backing_node) const {
  return backing_owner_[backing_node];
}

bool TemporalForest::same_tree(VertexId u, VertexId v) {
  if (u == v) return true;
  NodeId bu = verts_.at(u).backing;
  NodeId bv = verts_.at(v).backing;
  // A vertex without a backing node is an isolated singleton.
  if (bu == DynamicForest::kNone || bv == DynamicForest::kNone) return false;
  return backing_.root(bu) == backing_.root(bv);
}

void TemporalForest::ensure_backing(VertexId v) {
  VtxRec& r = verts_.at(v);
  if (r.backing != DynamicForest::kNone) return;
  r.backing = backing_.add_node();
  if (r.backing >= backing_owner_.size()) backing_owner_.resize(r.backing + 1);
  backing_owner_[r.backing] = v;
}

void TemporalForest::drop_backing_if_isolated(VertexId v) {
  VtxRec& r = verts_.at(v);
  if (r.backing == DynamicForest::kNone) return;
  if (!r.parent && r.child_count == 0) {
    backing_.remove_node(r.backing);
    r.backing = DynamicForest::kNone;
  }
}

std::optional<TemporalForest::SigmaF> TemporalForest::twin_sigma(
    const TwinState& tw, VertexId u, std::int64_t label) const {
  const VtxRec& ru = vtx(u, "sigma");
  if (!ru.parent) fail("sigma: vertex is a root");
  VertexId v = *ru.parent;
  auto dit = tw.dict.find(u);
  if (dit == tw.dict.end() || !dit->second.contains(label)) {
    fail("sigma: no such node");
  }
  std::optional<OrderedIndex<BlockKeyPlain, NodeId>::Entry> su;
  if (auto bit = tw.block.find(v); bit != tw.block.end()) {
    su = bit->second.succ(BlockKeyPlain{label, u}, /*strict=*/true);
  }
  if (!verts_.at(v).parent) {
    if (!su) return std::nullopt;
    return SigmaF{{su->key.vertex, TemporalLabel::plain(su->key.label)}, 0};
  }
  std::optional<std::int64_t> lp;
  if (auto pit = tw.dict.find(v); pit != tw.dict.end()) {
    if (auto e = pit->second.succ(label, /*strict=*/false)) lp = e->key;
  }
  // Absent successors count as +inf; red wins ties.
  if (su && (!lp || su->key.label <= *lp)) {
    return SigmaF{{su->key.vertex, TemporalLabel::plain(su->key.label)}, 0};
  }
  if (lp) return SigmaF{{v, TemporalLabel::plain(*lp)}, 1};
  return std::nullopt;
}

void TemporalForest::twin_detach(TwinState& tw, NodeId n) {
  NodeInfo& ni = tw.info[n];
  if (ni.parent == DynamicForest::kNone) return;
  tw.forest.cut(n);
  ++tw.counters.forest_ops;
  tw.info[ni.parent].child[ni.weight] = DynamicForest::kNone;
  ni.parent = DynamicForest::kNone;
}

void TemporalForest::twin_attach(TwinState& tw, NodeId n, NodeId p,
                                 int weight) {
  NodeInfo& ni = tw.info[n];
  if (ni.parent != DynamicForest::kNone) {
    throw std::logic_error("twin_attach: node already has a parent");
  }
  if (tw.info[p].child[weight] != DynamicForest::kNone) {
    throw std::logic_error("twin_attach: child slot occupied");
  }
  tw.forest.link(n, p, weight);
  ++tw.counters.forest_ops;
  ni.parent = p;
  ni.weight = weight;
  tw.info[p].child[weight] = n;
}

void TemporalForest::twin_fix_parent(TwinState& tw, VertexId u,
                                     std::int64_t label) {
  ++tw.counters.fix_parent_calls;
  NodeId n = *tw.dict.at(u).find(label);
  NodeId old_parent = tw.info[n].parent;
  int old_weight = tw.info[n].weight;
  twin_detach(tw, n);
  auto s = twin_sigma(tw, u, label);
  if (s) {
    NodeId p = *tw.dict.at(s->target.owner).find(s->target.label.departure);
    twin_attach(tw, n, p, s->weight);
  }
  bool changed = s ? (tw.info[n].parent != old_parent ||
                      s->weight != old_weight)
                   : (old_parent != DynamicForest::kNone);
  if (changed) ++tw.counters.rewires;
}

void TemporalForest::twin_add_label(TwinState& tw, VertexId u,
                                    std::int64_t label) {
  VertexId v = *verts_.at(u).parent;
  NodeId n = tw.forest.add_node();
  ++tw.counters.forest_ops;
  if (n >= tw.info.size()) tw.info.resize(n + 1);
  tw.info[n] = NodeInfo{u, label, DynamicForest::kNone, 0,
                        {DynamicForest::kNone, DynamicForest::kNone}};
  tw.dict[u].insert(label, n);
  tw.block[v].insert(BlockKeyPlain{label, u}, n);
  // Fix order: the block below u, then the in-block strict predecessor,
  // then the new node; predecessors first keeps child slots single-owner.
  if (auto bit = tw.block.find(u); bit != tw.block.end() && !bit->second.empty()) {
    if (auto e = bit->second.pred(BlockKeyPlain{label, kProbeVertex},
                                  /*strict=*/false)) {
      twin_fix_parent(tw, e->key.vertex, e->key.label);
    }
  }
  if (auto q = tw.block.at(v).pred(BlockKeyPlain{label, u}, /*strict=*/true)) {
    twin_fix_parent(tw, q->key.vertex, q->key.label);
  }
  twin_fix_parent(tw, u, label);
}

void TemporalForest::twin_delete_label(TwinState& tw, VertexId u,
                                       std::int64_t label) {
  VertexId v = *verts_.at(u).parent;
  NodeId n = *tw.dict.at(u).find(label);
  twin_detach(tw, n);
  for (int s = 0; s < 2; ++s) {
    NodeId c = tw.info[n].child[s];
    if (c != DynamicForest::kNone) twin_detach(tw, c);
  }
  tw.forest.remove_node(n);
  ++tw.counters.forest_ops;
  tw.dict.at(u).erase(label);
  tw.block.at(v).erase(BlockKeyPlain{label, u});
  if (auto bit = tw.block.find(u); bit != tw.block.end() && !bit->second.empty()) {
    if (auto e = bit->second.pred(BlockKeyPlain{label, kProbeVertex},
                                  /*strict=*/false)) {
      twin_fix_parent(tw, e->key.vertex, e->key.label);
    }
  }
  if (auto q = tw.block.at(v).pred(BlockKeyPlain{label, u}, /*strict=*/true)) {
    twin_fix_parent(tw, q->key.vertex, q->key.label);
  }
}

void TemporalForest::begin_update() {
  for (int i = 0; i < 2; ++i) before_[i] = twins_[i].counters;
  backing_before_ = backing_.mutation_count();
}

void TemporalForest::end_update() {
  last_update_ = UpdateCounters{};
  for (int i = 0; i < 2; ++i) {
    UpdateCounters d = twins_[i].counters - before_[i];
    last_update_.fix_parent_calls =
        std::max(last_update_.fix_parent_calls, d.fix_parent_calls);
    last_update_.rewires = std::max(last_update_.rewires, d.rewires);
    last_update_.forest_ops = std::max(last_update_.forest_ops, d.forest_ops);
  }
  last_backing_ops_ = backing_.mutation_count() - backing_before_;
}

VertexId TemporalForest::add_vertex() {
  VertexId v = verts_.empty() ? 0 : std::prev(verts_.end())->first + 1;
  add_vertex(v);
  return v;
}

void TemporalForest::add_vertex(VertexId v) {
  if (v == kProbeVertex) fail("add_vertex: reserved vertex id");
  if (verts_.count(v)) fail("add_vertex: vertex already exists");
  begin_update();
  verts_[v] = VtxRec{};
  end_update();
}

void TemporalForest::delete_vertex(VertexId v) {
  const VtxRec& r = vtx(v, "delete_vertex");
  if (r.parent) fail("delete_vertex: vertex has a parent");
  if (r.child_count != 0) fail("delete_vertex: vertex has children");
  begin_update();
  if (r.backing != DynamicForest::kNone) backing_.remove_node(r.backing);
  for (TwinState& tw : twins_) {
    tw.dict.erase(v);
    tw.block.erase(v);
  }
  verts_.erase(v);
  end_update();
}

void TemporalForest::link(VertexId u, VertexId v, std::int64_t label) {
  const VtxRec& ru = vtx(u, "link");
  vtx(v, "link");
  check_label_range(label, "link");
  if (ru.parent) fail("link: child endpoint is not a root");
  if (same_tree(u, v)) fail("link: endpoints share a tree");
  begin_update();
  ensure_backing(u);
  ensure_backing(v);
  backing_.link(verts_.at(u).backing, verts_.at(v).backing, 1);
  verts_.at(u).parent = v;
  verts_.at(u).label_count = 1;
  ++verts_.at(v).child_count;
  ++label_count_;
  for (TwinState& tw : twins_) twin_add_label(tw, u, tw.sign * label);
  end_update();
}

void TemporalForest::cut(VertexId v) {
  const VtxRec& r = vtx(v, "cut");
  if (!r.parent) fail("cut: vertex is a root");
  if (r.label_count != 1) fail("cut: edge carries more than one label");
  begin_update();
  VertexId p = *r.parent;
  for (TwinState& tw : twins_) {
    std::int64_t only = tw.dict.at(v).first()->key;
    twin_delete_label(tw, v, only);
  }
  backing_.cut(verts_.at(v).backing);
  verts_.at(v).parent.reset();
  verts_.at(v).label_count = 0;
  --verts_.at(p).child_count;
  --label_count_;
  drop_backing_if_isolated(v);
  drop_backing_if_isolated(p);
  end_update();
}

void TemporalForest::add_label(VertexId v, std::int64_t label) {
  const VtxRec& r = vtx(v, "add_label");
  check_label_range(label, "add_label");
  if (!r.parent) fail("add_label: vertex is a root");
  if (twins_[0].dict.at(v).contains(label)) {
    fail("add_label: label already present");
  }
  begin_update();
  ++verts_.at(v).label_count;
  ++label_count_;
  for (TwinState& tw : twins_) twin_add_label(tw, v, tw.sign * label);
  end_update();
}

void TemporalForest::delete_label(VertexId v, std::int64_t label) {
  const VtxRec& r = vtx(v, "delete_label");
  if (!r.parent) fail("delete_label: vertex is a root");
  auto dit = twins_[0].dict.find(v);
  if (dit == twins_[0].dict.end() || !dit->second.contains(label)) {
    fail("delete_label: label not present");
  }
  if (r.label_count == 1) fail("delete_label: last label requires cut");
  begin_update();
  --verts_.at(v).label_count;
  --label_count_;
  for (TwinState& tw : twins_) twin_delete_label(tw, v, tw.sign * label);
  end_update();
}

TimeValue TemporalForest::twin_ea_up(TwinState& tw, VertexId u, VertexId anc,
                                     TimeValue t) {
  auto dit = tw.dict.find(u);
  if (dit == tw.dict.end()) return TimeValue::pos_inf();
  std::optional<OrderedIndex<std::int64_t, NodeId>::Entry> start;
  if (t.is_pos_inf()) {
    return TimeValue::pos_inf();
  } else if (t.is_neg_inf()) {
    start = dit->second.first();
  } else {
    start = dit->second.succ(t.value(), /*strict=*/false);
  }
  if (!start) return TimeValue::pos_inf();
  auto hops =
      backing_.distance(verts_.at(u).backing, verts_.at(anc).backing);
  if (!hops || *hops == 0) {
    throw std::logic_error("twin_ea_up: bad ancestor");
  }
  auto land = tw.forest.level_ancestor(start->value, *hops - 1);
  if (!land) return TimeValue::pos_inf();
  const NodeInfo& ni = tw.info[*land];
  if (verts_.at(ni.owner).parent != anc) {
    throw std::logic_error("twin_ea_up: landed outside the target block");
  }
  return TimeValue::finite(ni.label);
}

TimeValue TemporalForest::twin_ld_up(TwinState& tw, VertexId u, VertexId anc,
                                     TimeValue t) {
  auto dit = tw.dict.find(u);
  if (dit == tw.dict.end()) return TimeValue::neg_inf();
  const auto& dict = dit->second;
  std::size_t n = dict.size();
  std::size_t lo = 0, hi = n;
  std::optional<std::int64_t> best;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    // Take the largest departure label whose earliest arrival at anc is
    // still within t; the predicate is monotone in the label.  An infinite
    // arrival means no walk at all, which never qualifies.
    std::int64_t cand = dict.select(mid).key;
    TimeValue a = twin_ea_up(tw, u, anc, TimeValue::finite(cand));
    if (!a.is_pos_inf() && a <= t) {
      best = cand;
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (!best) return TimeValue::neg_inf();
  return TimeValue::finite(*best);
}

TimeValue TemporalForest::ea(VertexId u, VertexId v, TimeValue t) {
  vtx(u, "ea");
  vtx(v, "ea");
  if (u == v) return t;
  if (!same_tree(u, v)) return TimeValue::pos_inf();
  NodeId bu = verts_.at(u).backing;
  NodeId bv = verts_.at(v).backing;
  VertexId w = owner_of(*backing_.lca(bu, bv));
  TwinState& fwd = twins_[0];
  TwinState& mir = twins_[1];
  TimeValue t1 = u == w ? t : twin_ea_up(fwd, u, w, t);
  if (v == w) return t1;
  // Descending from w is the mirrored ascent from v.
  return -twin_ld_up(mir, v, w, -t1);
}

TimeValue TemporalForest::ld(VertexId u, VertexId v, TimeValue t) {
  vtx(u, "ld");
  vtx(v, "ld");
  if (u == v) return t;
  if (!same_tree(u, v)) return TimeValue::neg_inf();
  NodeId bu = verts_.at(u).backing;
  NodeId bv = verts_.at(v).backing;
  VertexId w = owner_of(*backing_.lca(bu, bv));
  TwinState& fwd = twins_[0];
  TwinState& mir = twins_[1];
  TimeValue t1 = v == w ? t : -twin_ea_up(mir, v, w, -t);
  if (u == w) return t1;
  return twin_ld_up(fwd, u, w, t1);
}

bool TemporalForest::reach(VertexId u, VertexId v, TimeValue t_dep,
                           TimeValue t_arr) {
  vtx(u, "reach");
  vtx(v, "reach");
  if (u == v) return t_dep <= t_arr;
  if (!same_tree(u, v)) return false;
  NodeId bu = verts_.at(u).backing;
  NodeId bv = verts_.at(v).backing;
  VertexId w = owner_of(*backing_.lca(bu, bv));
  TwinState& fwd = twins_[0];
  TwinState& mir = twins_[1];
  TimeValue earliest_at_meet = u == w ? t_dep : twin_ea_up(fwd, u, w, t_dep);
  TimeValue latest_from_meet = v == w ? t_arr : -twin_ea_up(mir, v, w, -t_arr);
  // An infinite meet bound means the leg cannot be traversed at all; the
  // bare comparison would accept +inf <= +inf.
  return !earliest_at_meet.is_pos_inf() && !latest_from_meet.is_neg_inf() &&
         earliest_at_meet <= latest_from_meet;
}

std::optional<TemporalForest::SigmaF> TemporalForest::sigma(
    Twin w, VertexId v, std::int64_t label) const {
  return twin_sigma(twins_[static_cast<int>(w)], v, label);
}

void TemporalForest::fix_parent(Twin w, VertexId v, std::int64_t label) {
  TwinState& tw = twins_[static_cast<int>(w)];
  auto dit = tw.dict.find(v);
  if (dit == tw.dict.end() || !dit->second.contains(label)) {
    fail("fix_parent: no such node");
  }
  twin_fix_parent(tw, v, label);
}

StructureSnapshot TemporalForest::snapshot(Twin w) const {
  const TwinState& tw = twins_[static_cast<int>(w)];
  StructureSnapshot snap;
  for (const auto& [v, rec] : verts_) {
    (void)rec;
    auto dit = tw.dict.find(v);
    if (dit == tw.dict.end()) continue;
    dit->second.for_each([&](std::int64_t l, NodeId n) {
      SnapshotEntry entry;
      entry.key = {v, TemporalLabel::plain(l)};
      const NodeInfo& ni = tw.info[n];
      if (ni.parent != DynamicForest::kNone) {
        const NodeInfo& pi = tw.info[ni.parent];
        entry.parent = FNodeKey{pi.owner, TemporalLabel::plain(pi.label)};
        entry.weight = ni.weight;
      }
      snap.nodes.push_back(entry);
    });
  }
  return snap;
}

ForestTopology TemporalForest::export_topology() const {
  ForestTopology topo;
  for (const auto& [v, rec] : verts_) {
    (void)rec;
    topo.add_vertex(v);
  }
  // Children before parents is not required; links go child -> parent and
  // every vertex already exists.
  for (const auto& [v, rec] : verts_) {
    if (!rec.parent) continue;
    bool first = true;
    twins_[0].dict.at(v).for_each([&](std::int64_t l, NodeId) {
      if (first) {
        topo.link(v, *rec.parent, TemporalLabel::plain(l));
        first = false;
      } else {
        topo.add_label(v, TemporalLabel::plain(l));
      }
    });
  }
  return topo;
}

}  // namespace tempora
