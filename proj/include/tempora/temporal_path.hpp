#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tempora/counters.hpp"
#include "tempora/dynamic_forest.hpp"
#include "tempora/ordered_index.hpp"
#include "tempora/snapshot.hpp"
#include "tempora/time_value.hpp"

namespace tempora {

// Fixed path v_0 .. v_{n-1}; edge i joins v_i and v_{i+1} and carries a set
// of integer labels.  A temporal walk uses nondecreasing labels.  Earliest
// arrival and latest departure between any two positions take O(log M) via
// successor forests kept over four copies of the label sequence: forward,
// reversed, negated, and reversed+negated.  Each copy answers rightward
// earliest-arrival queries; direction and time reversal pick the copy.
//
// Unlike edges of a linked forest, path edges may carry empty label sets.
class TemporalPath {
 public:
  enum class Copy { kFwd = 0, kBwd = 1, kNegFwd = 2, kNegBwd = 3 };

  struct Sigma {
    std::size_t edge = 0;
    std::int64_t label = 0;
    int weight = 0;
  };

  explicit TemporalPath(const std::vector<std::vector<std::int64_t>>& labels);

  std::size_t vertex_count() const { return edge_count_ + 1; }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t label_count() const { return label_count_; }

  void add_label(std::size_t edge, std::int64_t label);
  void delete_label(std::size_t edge, std::int64_t label);

  TimeValue ea(std::size_t i, std::size_t j, TimeValue t);
  TimeValue ld(std::size_t i, std::size_t j, TimeValue t);

  // Introspection in copy-local coordinates (edge positions and label signs
  // as stored in that copy).
  std::optional<Sigma> sigma(Copy c, std::size_t edge,
                             std::int64_t label) const;
  void fix_parent(Copy c, std::size_t edge, std::int64_t label);
  StructureSnapshot snapshot(Copy c) const;
  std::vector<std::vector<TemporalLabel>> copy_labels(Copy c) const;

  const UpdateCounters& totals(Copy c) const { return copies_[idx(c)].counters; }
  // Deltas accumulated by the most recent add_label/delete_label, maximised
  // over the four copies field by field.
  const UpdateCounters& last_update() const { return last_update_; }

 private:
  struct CopyState {
    DynamicForest forest;
    std::vector<OrderedIndex<std::int64_t, DynamicForest::NodeId>> dict;
    struct NodeInfo {
      std::size_t edge = 0;
      std::int64_t label = 0;
      DynamicForest::NodeId parent = DynamicForest::kNone;
      int weight = 0;
      DynamicForest::NodeId child[2] = {DynamicForest::kNone,
                                        DynamicForest::kNone};
    };
    std::vector<NodeInfo> info;
    UpdateCounters counters;

    std::optional<Sigma> sigma(std::size_t edge, std::int64_t label) const;
    void detach(DynamicForest::NodeId n);
    void attach(DynamicForest::NodeId n, DynamicForest::NodeId p, int weight);
    void fix_parent(std::size_t edge, std::int64_t label);
    void add_label(std::size_t edge, std::int64_t label);
    void delete_label(std::size_t edge, std::int64_t label);
    TimeValue ea(std::size_t i, std::size_t j, TimeValue t);
  };

  static std::size_t idx(Copy c) { return static_cast<std::size_t>(c); }
  // Position of structure edge `e` inside copy c.
  std::size_t copy_edge(Copy c, std::size_t e) const;
  static bool negated(Copy c) {
    return c == Copy::kNegFwd || c == Copy::kNegBwd;
  }
  static bool reversed(Copy c) {
    return c == Copy::kBwd || c == Copy::kNegBwd;
  }
  void apply_add(std::size_t edge, std::int64_t label);

  std::size_t edge_count_;
  std::size_t label_count_ = 0;
  CopyState copies_[4];
  UpdateCounters last_update_;
};

}  // namespace tempora
