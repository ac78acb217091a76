#include "tempora/temporal_forest_latency.hpp"

#include <stdexcept>
#include <string>

namespace tempora {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

const TemporalForestLatency::VtxRec& TemporalForestLatency::vtx(
    VertexId v, const char* what) const {
  auto it = verts_.find(v);
  if (it == verts_.end()) {
    fail(std::string(what) + ": unknown vertex " + std::to_string(v));
  }
  return it->second;
}

VertexId TemporalForestLatency::owner_of(NodeId backing_node) const {
  return backing_owner_[backing_node];
}

bool TemporalForestLatency::same_tree(VertexId u, VertexId v) {
  if (u == v) return true;
  NodeId bu = verts_.at(u).backing;
  NodeId bv = verts_.at(v).backing;
  if (bu == DynamicForest::kNone || bv == DynamicForest::kNone) return false;
  return backing_.root(bu) == backing_.root(bv);
}

void TemporalForestLatency::ensure_backing(VertexId v) {
  VtxRec& r = verts_.at(v);
  if (r.backing != DynamicForest::kNone) return;
  r.backing = backing_.add_node();
  if (r.backing >= backing_owner_.size()) backing_owner_.resize(r.backing + 1);
  backing_owner_[r.backing] = v;
}

void TemporalForestLatency::drop_backing_if_isolated(VertexId v) {
  VtxRec& r = verts_.at(v);
  if (r.backing == DynamicForest::kNone) return;
  if (!r.parent && r.child_count == 0) {
    backing_.remove_node(r.backing);
    r.backing = DynamicForest::kNone;
  }
}

std::optional<TemporalLabel> TemporalForestLatency::twin_next_hop(
    const TwinState& tw, VertexId u, std::int64_t a) const {
  const VtxRec& ru = vtx(u, "next_hop");
  if (!ru.parent) fail("next_hop: vertex is a root");
  VertexId v = *ru.parent;
  if (!verts_.at(v).parent) return std::nullopt;
  auto dit = tw.dict.find(v);
  if (dit == tw.dict.end()) return std::nullopt;
  auto e = dit->second.min_arrival(TimeValue::finite(a));
  if (!e) return std::nullopt;
  return e->key;
}

std::optional<TemporalForestLatency::SigmaF> TemporalForestLatency::twin_sigma(
    const TwinState& tw, VertexId u, const TemporalLabel& label) const {
  const VtxRec& ru = vtx(u, "sigma");
  if (!ru.parent) fail("sigma: vertex is a root");
  VertexId v = *ru.parent;
  auto dit = tw.dict.find(u);
  if (dit == tw.dict.end() || !dit->second.contains(label)) {
    fail("sigma: no such node");
  }
  std::optional<BlockIndex::Entry> su;
  if (auto bit = tw.block.find(v); bit != tw.block.end()) {
    su = bit->second.succ(key_of(u, label), /*strict=*/true);
  }
  auto red_of = [](const BlockIndex::Entry& e) {
    return SigmaF{
        {e.key.vertex, TemporalLabel{e.key.departure, e.key.arrival}}, 0};
  };
  if (!verts_.at(v).parent) {
    if (!su) return std::nullopt;
    return red_of(*su);
  }
  auto nh = twin_next_hop(tw, u, label.arrival);
  // Red when the in-block successor's arrival still makes the NextHop pair
  // (absent successors count as +inf).
  if (su && (!nh || su->key.arrival <= nh->departure)) return red_of(*su);
  if (nh) return SigmaF{{v, *nh}, 1};
  return std::nullopt;
}

void TemporalForestLatency::refresh_head(TwinState& tw, NodeId n) {
  const NodeInfo& ni = tw.info[n];
  VertexId v = *verts_.at(ni.owner).parent;
  BlockKeyLat key = key_of(ni.owner, ni.label);
  BlockIndex& h = tw.heads[v];
  bool want = ni.parent == DynamicForest::kNone || ni.weight == 1;
  bool have = h.contains(key);
  if (want && !have) h.insert(key, n);
  if (!want && have) h.erase(key);
}

void TemporalForestLatency::twin_detach(TwinState& tw, NodeId n) {
  NodeInfo& ni = tw.info[n];
  if (ni.parent == DynamicForest::kNone) return;
  tw.forest.cut(n);
  ++tw.counters.forest_ops;
  tw.info[ni.parent].child[ni.weight] = DynamicForest::kNone;
  ni.parent = DynamicForest::kNone;
  refresh_head(tw, n);
}

void TemporalForestLatency::twin_attach(TwinState& tw, NodeId n, NodeId p,
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
  refresh_head(tw, n);
}

void TemporalForestLatency::twin_rewire(TwinState& tw, NodeId n, NodeId p,
                                        int weight) {
  twin_detach(tw, n);
  twin_attach(tw, n, p, weight);
  ++tw.counters.rewires;
}

void TemporalForestLatency::twin_fix_parent(TwinState& tw, VertexId u,
                                            const TemporalLabel& label) {
  ++tw.counters.fix_parent_calls;
  NodeId n = *tw.dict.at(u).find(label);
  NodeId old_parent = tw.info[n].parent;
  int old_weight = tw.info[n].weight;
  twin_detach(tw, n);
  auto s = twin_sigma(tw, u, label);
  if (s) {
    NodeId p = *tw.dict.at(s->target.owner).find(s->target.label);
    twin_attach(tw, n, p, s->weight);
  }
  bool changed = s ? (tw.info[n].parent != old_parent ||
                      s->weight != old_weight)
                   : (old_parent != DynamicForest::kNone);
  if (changed) ++tw.counters.rewires;
}

TimeValue TemporalForestLatency::beat_threshold(
    const PairIndex& dict, const TemporalLabel& l) const {
  // Pairs beating l in NextHop order arrive earlier, or tie on arrival with
  // a later departure.  The label l itself never beats itself, so this can
  // run on a dictionary that still (or already) contains l.
  auto m = dict.max_departure_below(TimeValue::finite(l.arrival + 1));
  if (m && m->key.departure > l.departure) {
    return TimeValue::finite(m->key.departure);
  }
  auto t1 = dict.max_departure_below(TimeValue::finite(l.arrival));
  if (t1) return TimeValue::finite(t1->key.departure);
  return TimeValue::neg_inf();
}

void TemporalForestLatency::twin_add_label(TwinState& tw, VertexId u,
                                           const TemporalLabel& label) {
  VertexId v = *verts_.at(u).parent;
  NodeId n = tw.forest.add_node();
  ++tw.counters.forest_ops;
  if (n >= tw.info.size()) tw.info.resize(n + 1);
  tw.info[n] = NodeInfo{u, label, DynamicForest::kNone, 0,
                        {DynamicForest::kNone, DynamicForest::kNone}};
  tw.dict[u].insert(label, n);
  tw.block[v].insert(key_of(u, label), n);
  refresh_head(tw, n);

  // The run of the child block whose NextHop becomes the new pair is the
  // consecutive range with arrival in (threshold, departure]; its interior
  // heads turn red onto their in-block successors and its last node turns
  // blue onto the new node.
  if (auto bit = tw.block.find(u); bit != tw.block.end() && !bit->second.empty()) {
    BlockIndex& bu = bit->second;
    TimeValue thr = beat_threshold(tw.dict.at(u), label);
    auto node_k = bu.pred(BlockKeyLat{label.departure, INT64_MAX, kProbeVertex},
                          /*strict=*/false);
    if (node_k && TimeValue::finite(node_k->key.arrival) > thr) {
      BlockIndex& hu = tw.heads[u];
      std::vector<BlockKeyLat> interior;
      std::optional<BlockIndex::Entry> cur;
      if (thr.is_neg_inf()) {
        cur = hu.first();
      } else {
        cur = hu.succ(BlockKeyLat{thr.value(), INT64_MAX, kProbeVertex},
                      /*strict=*/false);
      }
      while (cur && cur->key < node_k->key) {
        interior.push_back(cur->key);
        cur = hu.succ(cur->key, /*strict=*/true);
      }
      for (const BlockKeyLat& k : interior) {
        auto s = bu.succ(k, /*strict=*/true);
        twin_rewire(tw, *bu.find(k), s->value, 0);
      }
      twin_rewire(tw, node_k->value, n, 1);
    }
  }

  if (auto q = tw.block.at(v).pred(key_of(u, label), /*strict=*/true)) {
    twin_fix_parent(tw, q->key.vertex,
                    TemporalLabel{q->key.departure, q->key.arrival});
  }
  twin_fix_parent(tw, u, label);
}

void TemporalForestLatency::twin_delete_label(TwinState& tw, VertexId u,
                                              const TemporalLabel& label) {
  VertexId v = *verts_.at(u).parent;
  NodeId n = *tw.dict.at(u).find(label);
  NodeId bc = tw.info[n].child[1];
  twin_detach(tw, n);
  for (int s = 0; s < 2; ++s) {
    NodeId c = tw.info[n].child[s];
    if (c != DynamicForest::kNone) twin_detach(tw, c);
  }
  if (tw.heads.count(v) && tw.heads.at(v).contains(key_of(u, label))) {
    tw.heads.at(v).erase(key_of(u, label));
  }
  tw.forest.remove_node(n);
  ++tw.counters.forest_ops;
  tw.dict.at(u).erase(label);
  tw.block.at(v).erase(key_of(u, label));

  if (bc != DynamicForest::kNone) {
    // The orphaned run previously hopped onto the removed pair.  Walk it
    // right to left: each NextHop value change is a fresh head.
    const PairIndex& du = tw.dict.at(u);
    BlockIndex& bu = tw.block.at(u);
    TimeValue thr_del = beat_threshold(du, label);
    twin_fix_parent(tw, tw.info[bc].owner, tw.info[bc].label);
    NodeId cur = bc;
    for (;;) {
      auto z = du.min_arrival(TimeValue::finite(tw.info[cur].label.arrival));
      TimeValue bound;
      if (z) {
        bound = beat_threshold(du, z->key);
      } else {
        auto all = du.max_departure_below(TimeValue::pos_inf());
        bound = all ? TimeValue::finite(all->key.departure)
                    : TimeValue::neg_inf();
      }
      if (bound.is_neg_inf()) break;
      auto h = bu.pred(BlockKeyLat{bound.value(), INT64_MAX, kProbeVertex},
                       /*strict=*/false);
      if (!h) break;
      // Stop once the candidate never hopped onto the removed pair.
      if (!(TimeValue::finite(h->key.arrival) > thr_del &&
            h->key.arrival <= label.departure)) {
        break;
      }
      twin_fix_parent(tw, h->key.vertex,
                      TemporalLabel{h->key.departure, h->key.arrival});
      cur = h->value;
    }
  }

  if (auto q = tw.block.at(v).pred(key_of(u, label), /*strict=*/true)) {
    twin_fix_parent(tw, q->key.vertex,
                    TemporalLabel{q->key.departure, q->key.arrival});
  }
}

void TemporalForestLatency::begin_update() {
  for (int i = 0; i < 2; ++i) before_[i] = twins_[i].counters;
  backing_before_ = backing_.mutation_count();
}

void TemporalForestLatency::end_update() {
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

VertexId TemporalForestLatency::add_vertex() {
  VertexId v = verts_.empty() ? 0 : std::prev(verts_.end())->first + 1;
  add_vertex(v);
  return v;
}

void TemporalForestLatency::add_vertex(VertexId v) {
  if (v == kProbeVertex) fail("add_vertex: reserved vertex id");
  if (verts_.count(v)) fail("add_vertex: vertex already exists");
  begin_update();
  verts_[v] = VtxRec{};
  end_update();
}

void TemporalForestLatency::delete_vertex(VertexId v) {
  const VtxRec& r = vtx(v, "delete_vertex");
  if (r.parent) fail("delete_vertex: vertex has a parent");
  if (r.child_count != 0) fail("delete_vertex: vertex has children");
  begin_update();
  if (r.backing != DynamicForest::kNone) backing_.remove_node(r.backing);
  for (TwinState& tw : twins_) {
    tw.dict.erase(v);
    tw.block.erase(v);
    tw.heads.erase(v);
  }
  verts_.erase(v);
  end_update();
}

void TemporalForestLatency::link(VertexId u, VertexId v,
                                 const TemporalLabel& label) {
  const VtxRec& ru = vtx(u, "link");
  vtx(v, "link");
  check_label(label, "link");
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
  for (TwinState& tw : twins_) {
    twin_add_label(tw, u, tw.mirror ? label.mirrored() : label);
  }
  end_update();
}

void TemporalForestLatency::cut(VertexId v) {
  const VtxRec& r = vtx(v, "cut");
  if (!r.parent) fail("cut: vertex is a root");
  if (r.label_count != 1) fail("cut: edge carries more than one label");
  begin_update();
  VertexId p = *r.parent;
  for (TwinState& tw : twins_) {
    TemporalLabel only = tw.dict.at(v).first()->key;
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

void TemporalForestLatency::add_label(VertexId v, const TemporalLabel& label) {
  const VtxRec& r = vtx(v, "add_label");
  check_label(label, "add_label");
  if (!r.parent) fail("add_label: vertex is a root");
  if (twins_[0].dict.at(v).contains(label)) {
    fail("add_label: label already present");
  }
  begin_update();
  ++verts_.at(v).label_count;
  ++label_count_;
  for (TwinState& tw : twins_) {
    twin_add_label(tw, v, tw.mirror ? label.mirrored() : label);
  }
  end_update();
}

void TemporalForestLatency::delete_label(VertexId v,
                                         const TemporalLabel& label) {
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
  for (TwinState& tw : twins_) {
    twin_delete_label(tw, v, tw.mirror ? label.mirrored() : label);
  }
  end_update();
}

TimeValue TemporalForestLatency::twin_ea_up(TwinState& tw, VertexId u,
                                            VertexId anc, TimeValue t) {
  auto dit = tw.dict.find(u);
  if (dit == tw.dict.end()) return TimeValue::pos_inf();
  auto start = dit->second.min_arrival(t);
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
  return TimeValue::finite(ni.label.arrival);
}

TimeValue TemporalForestLatency::twin_ld_up(TwinState& tw, VertexId u,
                                            VertexId anc, TimeValue t) {
  auto dit = tw.dict.find(u);
  if (dit == tw.dict.end()) return TimeValue::neg_inf();
  const auto& dict = dit->second;
  std::size_t n = dict.size();
  std::size_t lo = 0, hi = n;
  std::optional<std::int64_t> best;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t cand = dict.select(mid).key.departure;
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

TimeValue TemporalForestLatency::ea(VertexId u, VertexId v, TimeValue t) {
  vtx(u, "ea");
  vtx(v, "ea");
  if (u == v) return t;
  if (!same_tree(u, v)) return TimeValue::pos_inf();
  VertexId w = owner_of(
      *backing_.lca(verts_.at(u).backing, verts_.at(v).backing));
  TimeValue t1 = u == w ? t : twin_ea_up(twins_[0], u, w, t);
  if (v == w) return t1;
  return -twin_ld_up(twins_[1], v, w, -t1);
}

TimeValue TemporalForestLatency::ld(VertexId u, VertexId v, TimeValue t) {
  vtx(u, "ld");
  vtx(v, "ld");
  if (u == v) return t;
  if (!same_tree(u, v)) return TimeValue::neg_inf();
  VertexId w = owner_of(
      *backing_.lca(verts_.at(u).backing, verts_.at(v).backing));
  TimeValue t1 = v == w ? t : -twin_ea_up(twins_[1], v, w, -t);
  if (u == w) return t1;
  return twin_ld_up(twins_[0], u, w, t1);
}

bool TemporalForestLatency::reach(VertexId u, VertexId v, TimeValue t_dep,
                                  TimeValue t_arr) {
  vtx(u, "reach");
  vtx(v, "reach");
  if (u == v) return t_dep <= t_arr;
  if (!same_tree(u, v)) return false;
  VertexId w = owner_of(
      *backing_.lca(verts_.at(u).backing, verts_.at(v).backing));
  TimeValue earliest_at_meet =
      u == w ? t_dep : twin_ea_up(twins_[0], u, w, t_dep);
  TimeValue latest_from_meet =
      v == w ? t_arr : -twin_ea_up(twins_[1], v, w, -t_arr);
  // An infinite meet bound means the leg cannot be traversed at all; the
  // bare comparison would accept +inf <= +inf.
  return !earliest_at_meet.is_pos_inf() && !latest_from_meet.is_neg_inf() &&
         earliest_at_meet <= latest_from_meet;
}

std::optional<TemporalLabel> TemporalForestLatency::next_hop(
    Twin w, VertexId u, std::int64_t a) const {
  return twin_next_hop(twins_[static_cast<int>(w)], u, a);
}

std::optional<TemporalForestLatency::SigmaF> TemporalForestLatency::sigma(
    Twin w, VertexId v, const TemporalLabel& label) const {
  return twin_sigma(twins_[static_cast<int>(w)], v, label);
}

void TemporalForestLatency::fix_parent(Twin w, VertexId v,
                                       const TemporalLabel& label) {
  TwinState& tw = twins_[static_cast<int>(w)];
  auto dit = tw.dict.find(v);
  if (dit == tw.dict.end() || !dit->second.contains(label)) {
    fail("fix_parent: no such node");
  }
  twin_fix_parent(tw, v, label);
}

StructureSnapshot TemporalForestLatency::snapshot(Twin w) const {
  const TwinState& tw = twins_[static_cast<int>(w)];
  StructureSnapshot snap;
  snap.latency = true;
  for (const auto& [v, rec] : verts_) {
    (void)rec;
    if (auto dit = tw.dict.find(v); dit != tw.dict.end()) {
      dit->second.for_each([&](const TemporalLabel& l, NodeId n) {
        SnapshotEntry entry;
        entry.key = {v, l};
        const NodeInfo& ni = tw.info[n];
        if (ni.parent != DynamicForest::kNone) {
          const NodeInfo& pi = tw.info[ni.parent];
          entry.parent = FNodeKey{pi.owner, pi.label};
          entry.weight = ni.weight;
        }
        snap.nodes.push_back(entry);
      });
    }
    if (auto hit = tw.heads.find(v); hit != tw.heads.end()) {
      hit->second.for_each([&](const BlockKeyLat& k, NodeId) {
        snap.heads[v].push_back(
            FNodeKey{k.vertex, TemporalLabel{k.departure, k.arrival}});
      });
    }
  }
  return snap;
}

ForestTopology TemporalForestLatency::export_topology() const {
  ForestTopology topo;
  for (const auto& [v, rec] : verts_) {
    (void)rec;
    topo.add_vertex(v);
  }
  for (const auto& [v, rec] : verts_) {
    if (!rec.parent) continue;
    bool first = true;
    twins_[0].dict.at(v).for_each([&](const TemporalLabel& l, NodeId) {
      if (first) {
        topo.link(v, *rec.parent, l);
        first = false;
      } else {
        topo.add_label(v, l);
      }
    });
  }
  return topo;
}

}  // namespace tempora
