#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tempora/counters.hpp"
#include "tempora/dynamic_forest.hpp"
#include "tempora/forest_topology.hpp"
#include "tempora/ordered_index.hpp"
#include "tempora/snapshot.hpp"
#include "tempora/time_value.hpp"

namespace tempora {

// Dynamic temporal forest whose labels carry latencies: an edge label is a
// pair (departure, arrival) with arrival >= departure.  Block nodes are
// ordered by (arrival, departure, vertex) and the cross-block successor is
// the NextHop pair: among labels of the parent edge departing no earlier
// than the node's arrival, the one arriving first (ties towards the latest
// departure).  Each block keeps the dictionary of its heads (nodes that are
// roots or blue-linked); insertions rewire one consecutive run of a block
// by consuming its interior heads, deletions rediscover the heads of the
// orphaned run, so update cost is amortised by head churn.
class TemporalForestLatency {
 public:
  enum class Twin { kForward = 0, kMirror = 1 };

  struct SigmaF {
    FNodeKey target;
    int weight = 0;
  };

  TemporalForestLatency() { twins_[1].mirror = true; }
  TemporalForestLatency(const TemporalForestLatency&) = delete;
  TemporalForestLatency& operator=(const TemporalForestLatency&) = delete;

  VertexId add_vertex();
  void add_vertex(VertexId v);
  void delete_vertex(VertexId v);
  void link(VertexId u, VertexId v, const TemporalLabel& label);
  void cut(VertexId v);
  void add_label(VertexId v, const TemporalLabel& label);
  void delete_label(VertexId v, const TemporalLabel& label);

  TimeValue ea(VertexId u, VertexId v, TimeValue t);
  TimeValue ld(VertexId u, VertexId v, TimeValue t);
  bool reach(VertexId u, VertexId v, TimeValue t_dep, TimeValue t_arr);

  std::size_t vertex_count() const { return verts_.size(); }
  std::size_t label_count() const { return label_count_; }
  bool has_vertex(VertexId v) const { return verts_.count(v) != 0; }

  // NextHop on edge e_{p(u)} from arrival `a`, in twin coordinates.
  std::optional<TemporalLabel> next_hop(Twin w, VertexId u,
                                        std::int64_t a) const;
  std::optional<SigmaF> sigma(Twin w, VertexId v,
                              const TemporalLabel& label) const;
  void fix_parent(Twin w, VertexId v, const TemporalLabel& label);
  StructureSnapshot snapshot(Twin w) const;
  ForestTopology export_topology() const;

  const UpdateCounters& totals(Twin w) const {
    return twins_[static_cast<int>(w)].counters;
  }
  const UpdateCounters& last_update() const { return last_update_; }
  std::uint64_t last_backing_ops() const { return last_backing_ops_; }

 private:
  using NodeId = DynamicForest::NodeId;
  using PairIndex = OrderedIndex<TemporalLabel, NodeId>;
  using BlockIndex = OrderedIndex<BlockKeyLat, NodeId>;

  struct VtxRec {
    std::optional<VertexId> parent;
    std::uint32_t child_count = 0;
    std::uint32_t label_count = 0;
    NodeId backing = DynamicForest::kNone;
  };

  struct NodeInfo {
    VertexId owner = 0;
    TemporalLabel label;
    NodeId parent = DynamicForest::kNone;
    int weight = 0;
    NodeId child[2] = {DynamicForest::kNone, DynamicForest::kNone};
  };

  struct TwinState {
    DynamicForest forest;
    std::map<VertexId, PairIndex> dict;
    std::map<VertexId, BlockIndex> block;
    std::map<VertexId, BlockIndex> heads;
    std::vector<NodeInfo> info;
    UpdateCounters counters;
    bool mirror = false;
  };

  static BlockKeyLat key_of(VertexId owner, const TemporalLabel& l) {
    return BlockKeyLat{l.arrival, l.departure, owner};
  }

  const VtxRec& vtx(VertexId v, const char* what) const;
  bool same_tree(VertexId u, VertexId v);
  VertexId owner_of(NodeId backing_node) const;
  void ensure_backing(VertexId v);
  void drop_backing_if_isolated(VertexId v);

  std::optional<TemporalLabel> twin_next_hop(const TwinState& tw, VertexId u,
                                             std::int64_t a) const;
  std::optional<SigmaF> twin_sigma(const TwinState& tw, VertexId u,
                                   const TemporalLabel& label) const;
  void refresh_head(TwinState& tw, NodeId n);
  void twin_detach(TwinState& tw, NodeId n);
  void twin_attach(TwinState& tw, NodeId n, NodeId p, int weight);
  void twin_rewire(TwinState& tw, NodeId n, NodeId p, int weight);
  void twin_fix_parent(TwinState& tw, VertexId u, const TemporalLabel& label);
  void twin_add_label(TwinState& tw, VertexId u, const TemporalLabel& label);
  void twin_delete_label(TwinState& tw, VertexId u,
                         const TemporalLabel& label);
  // Largest departure among pairs of dict beating `l` in NextHop order;
  // nodes of the child block whose arrival exceeds it have NextHop == l.
  TimeValue beat_threshold(const PairIndex& dict, const TemporalLabel& l) const;

  TimeValue twin_ea_up(TwinState& tw, VertexId u, VertexId anc, TimeValue t);
  TimeValue twin_ld_up(TwinState& tw, VertexId u, VertexId anc, TimeValue t);

  void begin_update();
  void end_update();

  std::map<VertexId, VtxRec> verts_;
  std::size_t label_count_ = 0;
  DynamicForest backing_;
  std::vector<VertexId> backing_owner_;
  TwinState twins_[2];
  UpdateCounters last_update_;
  std::uint64_t last_backing_ops_ = 0;
  UpdateCounters before_[2];
  std::uint64_t backing_before_ = 0;
};

}  // namespace tempora
