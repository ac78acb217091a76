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

// Dynamic temporal forest without latencies.  Vertices form a rooted forest
// maintained in a dynamic-forest backing; every labelled edge contributes
// one node per label to a successor forest whose weighted level ancestors
// answer upward earliest-arrival queries in O(log) time.  A second twin
// holds the negated instance, which turns downward latest-departure (and
// hence general earliest-arrival) queries into upward ones.  Upward latest
// departure binary-searches the departure dictionary.
class TemporalForest {
 public:
  enum class Twin { kForward = 0, kMirror = 1 };

  struct SigmaF {
    FNodeKey target;
    int weight = 0;
  };

  TemporalForest() { twins_[1].sign = -1; }
  TemporalForest(const TemporalForest&) = delete;
  TemporalForest& operator=(const TemporalForest&) = delete;

  VertexId add_vertex();
  void add_vertex(VertexId v);
  void delete_vertex(VertexId v);
  void link(VertexId u, VertexId v, std::int64_t label);
  void cut(VertexId v);
  void add_label(VertexId v, std::int64_t label);
  void delete_label(VertexId v, std::int64_t label);

  TimeValue ea(VertexId u, VertexId v, TimeValue t);
  TimeValue ld(VertexId u, VertexId v, TimeValue t);
  bool reach(VertexId u, VertexId v, TimeValue t_dep, TimeValue t_arr);

  std::size_t vertex_count() const { return verts_.size(); }
  std::size_t label_count() const { return label_count_; }
  bool has_vertex(VertexId v) const { return verts_.count(v) != 0; }

  // Introspection.  Labels are given in twin coordinates: the mirror twin
  // stores every label negated.
  std::optional<SigmaF> sigma(Twin w, VertexId v, std::int64_t label) const;
  void fix_parent(Twin w, VertexId v, std::int64_t label);
  StructureSnapshot snapshot(Twin w) const;
  // Plain copy of the maintained forest, suitable for oracles; the mirror
  // twin must match export_topology().mirrored().
  ForestTopology export_topology() const;

  const UpdateCounters& totals(Twin w) const {
    return twins_[static_cast<int>(w)].counters;
  }
  // Field-wise maximum over the two twins of the work done by the most
  // recent update.
  const UpdateCounters& last_update() const { return last_update_; }
  std::uint64_t last_backing_ops() const { return last_backing_ops_; }

 private:
  using NodeId = DynamicForest::NodeId;

  struct VtxRec {
    std::optional<VertexId> parent;
    std::uint32_t child_count = 0;
    std::uint32_t label_count = 0;
    NodeId backing = DynamicForest::kNone;
  };

  struct NodeInfo {
    VertexId owner = 0;
    std::int64_t label = 0;
    NodeId parent = DynamicForest::kNone;
    int weight = 0;
    NodeId child[2] = {DynamicForest::kNone, DynamicForest::kNone};
  };

  struct TwinState {
    DynamicForest forest;
    std::map<VertexId, OrderedIndex<std::int64_t, NodeId>> dict;
    std::map<VertexId, OrderedIndex<BlockKeyPlain, NodeId>> block;
    std::vector<NodeInfo> info;
    UpdateCounters counters;
    int sign = 1;
  };

  const VtxRec& vtx(VertexId v, const char* what) const;
  bool same_tree(VertexId u, VertexId v);
  VertexId owner_of(NodeId backing_node) const;
  void ensure_backing(VertexId v);
  void drop_backing_if_isolated(VertexId v);

  std::optional<SigmaF> twin_sigma(const TwinState& tw, VertexId u,
                                   std::int64_t label) const;
  void twin_detach(TwinState& tw, NodeId n);
  void twin_attach(TwinState& tw, NodeId n, NodeId p, int weight);
  void twin_fix_parent(TwinState& tw, VertexId u, std::int64_t label);
  void twin_add_label(TwinState& tw, VertexId u, std::int64_t label);
  void twin_delete_label(TwinState& tw, VertexId u, std::int64_t label);

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
