#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tempora/forest_topology.hpp"
#include "tempora/temporal_path.hpp"
#include "tempora/time_value.hpp"

namespace tempora {

// Fixed-topology structure: a heavy-light decomposition whose paths are
// extended one edge toward the root, so every forest edge lies in exactly
// one path.  Each path keeps a TemporalPath over its label sets; any
// ancestor-descendant traversal crosses at most 2*ceil(log2(n+1)) paths,
// and queries compose earliest-arrival / latest-departure segment by
// segment.  LCA comes from a static Euler-tour sparse table.
//
// Topology never changes after construction; label sets may.  Latency
// labels are not supported here.
class HldForest {
 public:
  explicit HldForest(const ForestTopology& topo);

  std::size_t vertex_count() const { return order_.size(); }
  std::size_t path_count() const { return paths_.size(); }
  std::size_t path_edge_count(std::size_t path) const {
    return paths_.at(path).tp.edge_count();
  }

  void add_label(VertexId v, std::int64_t label);
  void delete_label(VertexId v, std::int64_t label);

  TimeValue ea(VertexId u, VertexId v, TimeValue t);
  TimeValue ld(VertexId u, VertexId v, TimeValue t);
  bool reach(VertexId u, VertexId v, TimeValue t_dep, TimeValue t_arr);

  std::optional<VertexId> lca(VertexId u, VertexId v) const;
  // Path structures crossed by the most recent query.
  std::size_t last_segments() const { return last_segments_; }

 private:
  struct PathRec {
    std::vector<VertexId> verts;  // rootmost first
    std::size_t top_depth = 0;
    TemporalPath tp;
  };
  // Positions within one path structure; `from` is the deeper endpoint.
  struct Segment {
    std::size_t path = 0;
    std::size_t from = 0;
    std::size_t to = 0;
  };

  std::size_t dense(VertexId v, const char* what) const;
  std::size_t pos_in(std::size_t path, std::size_t x) const {
    return depth_[x] - paths_[path].top_depth;
  }
  std::size_t euler_lca(std::size_t u, std::size_t v) const;
  // Walks from descendant `low` up to ancestor `high`, one path at a time.
  void collect(std::size_t low, std::size_t high,
               std::vector<Segment>& out) const;

  static constexpr std::size_t kNoPath = static_cast<std::size_t>(-1);

  std::vector<VertexId> order_;                   // dense index -> id
  std::unordered_map<VertexId, std::size_t> id_;  // id -> dense index
  std::vector<std::optional<std::size_t>> parent_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> root_;
  std::vector<std::size_t> path_of_edge_;  // keyed by the lower endpoint
  std::vector<std::size_t> label_count_;   // per edge, lower endpoint
  std::vector<PathRec> paths_;
  std::vector<std::size_t> first_;  // first Euler occurrence
  std::vector<std::size_t> tour_;
  std::vector<std::vector<std::size_t>> table_;  // depth argmin over tour_
  std::size_t last_segments_ = 0;
};

}  // namespace tempora
