#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tempora/time_value.hpp"

namespace tempora {

// Plain reference representation of a rooted temporal forest: a parent map
// plus, for every non-root v, the label multiset of the edge e_v = (v, p(v)).
// All mutators validate first and throw std::invalid_argument without
// touching the representation, so a rejected update leaves it bit-identical.
class ForestTopology {
 public:
  struct VertexRecord {
    std::optional<VertexId> parent;
    std::set<TemporalLabel> labels;  // labels of e_v; empty iff v is a root

    friend bool operator==(const VertexRecord&, const VertexRecord&) = default;
  };

  bool has_vertex(VertexId v) const { return verts_.count(v) != 0; }
  std::size_t vertex_count() const { return verts_.size(); }
  std::size_t label_count() const { return label_count_; }

  std::optional<VertexId> parent(VertexId v) const {
    return record(v, "parent").parent;
  }
  bool is_root(VertexId v) const { return !record(v, "is_root").parent; }
  const std::set<TemporalLabel>& labels(VertexId v) const {
    return record(v, "labels").labels;
  }
  const std::map<VertexId, VertexRecord>& vertices() const { return verts_; }

  VertexId root_of(VertexId v) const;
  // Hop distance between u and v, or nullopt if they are in different trees.
  std::optional<std::size_t> hop_distance(VertexId u, VertexId v) const;
  std::optional<VertexId> lowest_common_ancestor(VertexId u, VertexId v) const;
  // Edges from u up to its ancestor a, each named by its lower endpoint.
  std::vector<VertexId> upward_edges(VertexId u, VertexId a) const;

  VertexId add_vertex();            // allocates the smallest unused id
  void add_vertex(VertexId v);
  void remove_vertex(VertexId v);   // v must be isolated
  // u must be a root distinct from v's tree; creates e_u with label set {l}.
  void link(VertexId u, VertexId v, const TemporalLabel& l);
  // v must be a non-root whose edge carries exactly one label.
  void cut(VertexId v);
  void add_label(VertexId v, const TemporalLabel& l);
  // Refuses to remove the last label; that case must go through cut.
  void remove_label(VertexId v, const TemporalLabel& l);

  // Negated instance: edge directions logically flip, so each label (l, a)
  // becomes (-a, -l).  The parent map is unchanged.
  ForestTopology mirrored() const;

  friend bool operator==(const ForestTopology& a, const ForestTopology& b) {
    return a.verts_ == b.verts_;
  }

 private:
  const VertexRecord& record(VertexId v, const char* what) const;

  std::map<VertexId, VertexRecord> verts_;
  std::size_t label_count_ = 0;
};

// Update ops in the shape accepted by trace files.  Queries are carried in
// the same variant so a whole trace is one op sequence.
struct OpAddVertex { VertexId v; };
struct OpDelVertex { VertexId v; };
struct OpLink { VertexId u, v; TemporalLabel label; };
struct OpCut { VertexId v; };
struct OpAddLabel { VertexId v; TemporalLabel label; };
struct OpDelLabel { VertexId v; TemporalLabel label; };
struct OpQueryEa { VertexId u, v; TimeValue t; };
struct OpQueryLd { VertexId u, v; TimeValue t; };
struct OpQueryReach { VertexId u, v; TimeValue t_dep, t_arr; };

using TraceOp = std::variant<OpAddVertex, OpDelVertex, OpLink, OpCut,
                             OpAddLabel, OpDelLabel, OpQueryEa, OpQueryLd,
                             OpQueryReach>;

inline bool is_query(const TraceOp& op) {
  return std::holds_alternative<OpQueryEa>(op) ||
         std::holds_alternative<OpQueryLd>(op) ||
         std::holds_alternative<OpQueryReach>(op);
}

// Applies an update op to the plain representation; throws on queries.
void topo_apply(ForestTopology& topo, const TraceOp& op);

}  // namespace tempora
