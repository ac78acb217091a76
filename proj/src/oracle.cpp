#include "tempora/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tempora::oracle {

namespace {

void check_vertex(const ForestTopology& topo, VertexId v, const char* what) {
  if (!topo.has_vertex(v)) {
    throw std::invalid_argument(std::string(what) + ": unknown vertex " +
                                std::to_string(v));
  }
}

// Edges of the unique u-v path in traversal order, each named by its lower
// endpoint; empty optional if u and v are in different trees.
std::optional<std::vector<VertexId>> path_edges(const ForestTopology& topo,
                                                VertexId u, VertexId v) {
  auto w = topo.lowest_common_ancestor(u, v);
  if (!w) return std::nullopt;
  std::vector<VertexId> seq = topo.upward_edges(u, *w);
  std::vector<VertexId> down = topo.upward_edges(v, *w);
  seq.insert(seq.end(), down.rbegin(), down.rend());
  return seq;
}

TimeValue greedy_step(const std::set<TemporalLabel>& labels, TimeValue at) {
  TimeValue best = TimeValue::pos_inf();
  for (const TemporalLabel& l : labels) {
    if (TimeValue::finite(l.departure) >= at) {
      best = std::min(best, TimeValue::finite(l.arrival));
    }
  }
  return best;
}

}  // namespace

TimeValue ea(const ForestTopology& topo, VertexId u, VertexId v, TimeValue t) {
  check_vertex(topo, u, "ea");
  check_vertex(topo, v, "ea");
  if (u == v) return t;
  auto seq = path_edges(topo, u, v);
  if (!seq) return TimeValue::pos_inf();
  TimeValue cur = t;
  for (VertexId x : *seq) {
    cur = greedy_step(topo.labels(x), cur);
    if (cur.is_pos_inf()) break;
  }
  return cur;
}

TimeValue ld(const ForestTopology& topo, VertexId u, VertexId v, TimeValue t) {
  check_vertex(topo, u, "ld");
  check_vertex(topo, v, "ld");
  if (u == v) return t;
  return -ea(topo.mirrored(), v, u, -t);
}

TimeValue ld_backward(const ForestTopology& topo, VertexId u, VertexId v,
                      TimeValue t) {
  check_vertex(topo, u, "ld_backward");
  check_vertex(topo, v, "ld_backward");
  if (u == v) return t;
  auto seq = path_edges(topo, u, v);
  if (!seq) return TimeValue::neg_inf();
  TimeValue bound = t;
  for (auto it = seq->rbegin(); it != seq->rend(); ++it) {
    TimeValue best = TimeValue::neg_inf();
    for (const TemporalLabel& l : topo.labels(*it)) {
      if (TimeValue::finite(l.arrival) <= bound) {
        best = std::max(best, TimeValue::finite(l.departure));
      }
    }
    bound = best;
    if (bound.is_neg_inf()) break;
  }
  return bound;
}

bool reach(const ForestTopology& topo, VertexId u, VertexId v, TimeValue t_dep,
           TimeValue t_arr) {
  check_vertex(topo, u, "reach");
  check_vertex(topo, v, "reach");
  if (u == v) return t_dep <= t_arr;
  TimeValue a = ea(topo, u, v, t_dep);
  // +inf <= +inf would claim reachability where no path exists.
  return a.is_finite() && a <= t_arr;
}

namespace {

void ea_enumerate(const std::vector<const std::set<TemporalLabel>*>& seq,
                  std::size_t i, TimeValue cur, TimeValue& best) {
  if (i == seq.size()) {
    best = std::min(best, cur);
    return;
  }
  for (const TemporalLabel& l : *seq[i]) {
    if (TimeValue::finite(l.departure) >= cur) {
      ea_enumerate(seq, i + 1, TimeValue::finite(l.arrival), best);
    }
  }
}

void ld_enumerate(const std::vector<const std::set<TemporalLabel>*>& seq,
                  std::size_t i, TimeValue cur, TimeValue first_dep,
                  TimeValue arr_bound, TimeValue& best) {
  if (i == seq.size()) {
    if (cur <= arr_bound) best = std::max(best, first_dep);
    return;
  }
  for (const TemporalLabel& l : *seq[i]) {
    if (TimeValue::finite(l.departure) >= cur) {
      ld_enumerate(seq, i + 1, TimeValue::finite(l.arrival),
                   i == 0 ? TimeValue::finite(l.departure) : first_dep,
                   arr_bound, best);
    }
  }
}

std::vector<const std::set<TemporalLabel>*> label_seq(
    const ForestTopology& topo, const std::vector<VertexId>& seq) {
  std::vector<const std::set<TemporalLabel>*> out;
  out.reserve(seq.size());
  for (VertexId x : seq) out.push_back(&topo.labels(x));
  return out;
}

}  // namespace

TimeValue ea_exhaustive(const ForestTopology& topo, VertexId u, VertexId v,
                        TimeValue t) {
  check_vertex(topo, u, "ea_exhaustive");
  check_vertex(topo, v, "ea_exhaustive");
  if (u == v) return t;
  auto seq = path_edges(topo, u, v);
  if (!seq) return TimeValue::pos_inf();
  TimeValue best = TimeValue::pos_inf();
  ea_enumerate(label_seq(topo, *seq), 0, t, best);
  return best;
}

TimeValue ld_exhaustive(const ForestTopology& topo, VertexId u, VertexId v,
                        TimeValue t) {
  check_vertex(topo, u, "ld_exhaustive");
  check_vertex(topo, v, "ld_exhaustive");
  if (u == v) return t;
  auto seq = path_edges(topo, u, v);
  if (!seq) return TimeValue::neg_inf();
  TimeValue best = TimeValue::neg_inf();
  ld_enumerate(label_seq(topo, *seq), 0, TimeValue::neg_inf(),
               TimeValue::neg_inf(), t, best);
  return best;
}

TimeValue path_ea(const std::vector<std::vector<TemporalLabel>>& labels,
                  std::size_t i, std::size_t j, TimeValue t) {
  if (i == j) return t;
  TimeValue cur = t;
  auto step = [&](std::size_t e) {
    TimeValue best = TimeValue::pos_inf();
    for (const TemporalLabel& l : labels[e]) {
      if (TimeValue::finite(l.departure) >= cur) {
        best = std::min(best, TimeValue::finite(l.arrival));
      }
    }
    cur = best;
  };
  if (i < j) {
    for (std::size_t e = i; e < j && !cur.is_pos_inf(); ++e) step(e);
  } else {
    for (std::size_t e = i; e > j && !cur.is_pos_inf(); --e) step(e - 1);
  }
  return cur;
}

TimeValue path_ld(const std::vector<std::vector<TemporalLabel>>& labels,
                  std::size_t i, std::size_t j, TimeValue t) {
  if (i == j) return t;
  std::vector<std::vector<TemporalLabel>> mirrored(labels.size());
  for (std::size_t e = 0; e < labels.size(); ++e) {
    for (const TemporalLabel& l : labels[e]) {
      mirrored[e].push_back(l.mirrored());
    }
  }
  return -path_ea(mirrored, j, i, -t);
}

namespace {

// Neutral view of a rooted forest for successor recomputation; unlike the
// plain representation it tolerates empty label sets on edges.
struct PlainView {
  struct Vert {
    std::optional<VertexId> parent;
    std::vector<TemporalLabel> labels;
  };
  std::map<VertexId, Vert> verts;
};

PlainView view_of(const ForestTopology& topo) {
  PlainView view;
  for (const auto& [v, rec] : topo.vertices()) {
    view.verts[v] = {rec.parent,
                     std::vector<TemporalLabel>(rec.labels.begin(),
                                                rec.labels.end())};
  }
  return view;
}

PlainView view_of_chain(const std::vector<std::vector<TemporalLabel>>& labels) {
  PlainView view;
  std::size_t m = labels.size();
  for (std::size_t i = 0; i <= m; ++i) {
    PlainView::Vert vert;
    if (i < m) {
      vert.parent = static_cast<VertexId>(i + 1);
      vert.labels = labels[i];
    }
    view.verts[static_cast<VertexId>(i)] = vert;
  }
  return view;
}

struct BlockOrder {
  bool operator()(const FNodeKey& a, const FNodeKey& b) const {
    if (a.label.arrival != b.label.arrival) {
      return a.label.arrival < b.label.arrival;
    }
    if (a.label.departure != b.label.departure) {
      return a.label.departure < b.label.departure;
    }
    return a.owner < b.owner;
  }
};

std::string key_str(const FNodeKey& k) {
  std::ostringstream os;
  os << "(" << k.owner << ", " << k.label.departure << "/" << k.label.arrival
     << ")";
  return os.str();
}

std::vector<std::string> validate_view(const PlainView& view,
                                       const StructureSnapshot& snap) {
  std::vector<std::string> problems;
  auto complain = [&problems](const std::string& msg) {
    problems.push_back(msg);
  };

  std::set<FNodeKey> expected;
  std::map<VertexId, std::vector<FNodeKey>> blocks;  // keyed by block owner
  for (const auto& [v, vert] : view.verts) {
    if (!vert.parent) continue;
    for (const TemporalLabel& l : vert.labels) {
      expected.insert({v, l});
      blocks[*vert.parent].push_back({v, l});
    }
  }
  for (auto& [v, block] : blocks) {
    (void)v;
    std::sort(block.begin(), block.end(), BlockOrder{});
  }

  std::map<FNodeKey, const SnapshotEntry*> by_key;
  for (const SnapshotEntry& e : snap.nodes) {
    if (!by_key.emplace(e.key, &e).second) {
      complain("duplicate snapshot node " + key_str(e.key));
    }
    if (!expected.count(e.key)) {
      complain("snapshot node " + key_str(e.key) + " has no matching label");
    }
  }
  for (const FNodeKey& k : expected) {
    if (!by_key.count(k)) complain("label " + key_str(k) + " has no node");
  }
  if (!problems.empty()) return problems;

  // NextHop on edge e_v from arrival a: the label pair departing at >= a
  // with the smallest arrival, ties towards the largest departure.
  auto next_hop = [&view](VertexId v,
                          std::int64_t a) -> std::optional<TemporalLabel> {
    std::optional<TemporalLabel> best;
    for (const TemporalLabel& l : view.verts.at(v).labels) {
      if (l.departure < a) continue;
      if (!best || l.arrival < best->arrival ||
          (l.arrival == best->arrival && l.departure > best->departure)) {
        best = l;
      }
    }
    return best;
  };

  std::map<FNodeKey, int> red_children;
  std::map<FNodeKey, int> blue_children;
  std::map<VertexId, std::vector<FNodeKey>> expected_heads;

  for (const SnapshotEntry& e : snap.nodes) {
    if (!e.parent) continue;
    if (e.weight != 0 && e.weight != 1) {
      complain("node " + key_str(e.key) + " has weight " +
               std::to_string(e.weight));
      continue;
    }
    int& slot = e.weight == 0 ? red_children[*e.parent]
                              : blue_children[*e.parent];
    if (++slot > 1) {
      complain("node " + key_str(*e.parent) + " has two weight-" +
               std::to_string(e.weight) + " children");
    }
  }

  for (const FNodeKey& k : expected) {
    VertexId v = *view.verts.at(k.owner).parent;
    const std::vector<FNodeKey>& block = blocks.at(v);
    auto it = std::upper_bound(block.begin(), block.end(), k, BlockOrder{});
    std::optional<FNodeKey> red =
        it == block.end() ? std::nullopt : std::optional<FNodeKey>(*it);

    std::optional<FNodeKey> want;
    int want_weight = 0;
    if (!view.verts.at(v).parent) {
      want = red;
    } else {
      auto nh = next_hop(v, k.label.arrival);
      if (red && nh && red->label.arrival <= nh->departure) {
        want = red;
      } else if (nh) {
        want = FNodeKey{v, *nh};
        want_weight = 1;
      } else {
        want = red;
      }
    }

    const SnapshotEntry& got = *by_key.at(k);
    if (got.parent != want ||
        (want && got.weight != want_weight)) {
      std::string msg = "node " + key_str(k) + ": successor is ";
      msg += got.parent ? key_str(*got.parent) + "/w" + std::to_string(got.weight)
                        : std::string("none");
      msg += ", expected ";
      msg += want ? key_str(*want) + "/w" + std::to_string(want_weight)
                  : std::string("none");
      problems.push_back(msg);
    }
    if (!want || want_weight == 1) {
      expected_heads[v].push_back(k);
    }
  }

  for (auto& [v, hs] : expected_heads) {
    (void)v;
    std::sort(hs.begin(), hs.end(), BlockOrder{});
  }

  if (snap.latency) {
    std::map<VertexId, std::vector<FNodeKey>> got_heads = snap.heads;
    for (auto it = got_heads.begin(); it != got_heads.end();) {
      it = it->second.empty() ? got_heads.erase(it) : std::next(it);
    }
    if (got_heads != expected_heads) {
      for (const auto& [v, hs] : expected_heads) {
        auto git = got_heads.find(v);
        if (git == got_heads.end() || git->second != hs) {
          std::string msg = "block " + std::to_string(v) + ": heads are {";
          if (git != got_heads.end()) {
            for (const FNodeKey& k : git->second) msg += key_str(k);
          }
          msg += "}, expected {";
          for (const FNodeKey& k : hs) msg += key_str(k);
          msg += "}";
          complain(msg);
        }
      }
      for (const auto& [v, hs] : got_heads) {
        (void)hs;
        if (!expected_heads.count(v)) {
          complain("block " + std::to_string(v) + ": unexpected heads");
        }
      }
      if (problems.empty()) complain("head sets differ");
    }
  }

  return problems;
}

}  // namespace

std::vector<std::string> validate(const ForestTopology& topo,
                                  const StructureSnapshot& snap) {
  return validate_view(view_of(topo), snap);
}

std::vector<std::string> validate_chain(
    const std::vector<std::vector<TemporalLabel>>& labels,
    const StructureSnapshot& snap) {
  return validate_view(view_of_chain(labels), snap);
}

}  // namespace tempora::oracle
