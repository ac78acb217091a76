#include "tempora/hld_forest.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace tempora {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

HldForest::HldForest(const ForestTopology& topo) {
  for (const auto& [v, rec] : topo.vertices()) {
    id_[v] = order_.size();
    order_.push_back(v);
    for (const TemporalLabel& l : rec.labels) {
      if (!l.is_plain()) fail("HldForest: latency labels unsupported");
    }
  }
  std::size_t n = order_.size();
  parent_.resize(n);
  depth_.assign(n, 0);
  root_.assign(n, 0);
  path_of_edge_.assign(n, kNoPath);
  label_count_.assign(n, 0);
  first_.assign(n, 0);

  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto& rec = topo.vertices().at(order_[x]);
    if (rec.parent) {
      parent_[x] = id_.at(*rec.parent);
      kids[*parent_[x]].push_back(x);
    }
    label_count_[x] = rec.labels.size();
  }

  std::vector<std::size_t> pre;
  pre.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (parent_[r]) continue;
    std::vector<std::size_t> st{r};
    while (!st.empty()) {
      std::size_t x = st.back();
      st.pop_back();
      if (parent_[x]) depth_[x] = depth_[*parent_[x]] + 1;
      root_[x] = r;
      pre.push_back(x);
      for (std::size_t c : kids[x]) st.push_back(c);
    }
  }

  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> heavy(n, kNoPath);
  for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
    std::size_t x = *it;
    std::size_t best = 0;
    for (std::size_t c : kids[x]) {
      size[x] += size[c];
      if (size[c] > best) {  // ties keep the smallest id, seen first
        best = size[c];
        heavy[x] = c;
      }
    }
  }

  for (std::size_t t = 0; t < n; ++t) {
    bool top = !parent_[t] || heavy[*parent_[t]] != t;
    if (!top) continue;
    std::vector<std::size_t> chain{t};
    while (heavy[chain.back()] != kNoPath) chain.push_back(heavy[chain.back()]);
    if (!parent_[t]) {
      if (chain.size() == 1) continue;  // isolated root, no edges to cover
    } else {
      chain.insert(chain.begin(), *parent_[t]);  // one edge toward the root
    }
    std::size_t pid = paths_.size();
    std::vector<VertexId> verts;
    std::vector<std::vector<std::int64_t>> labels;
    verts.reserve(chain.size());
    for (std::size_t x : chain) verts.push_back(order_[x]);
    for (std::size_t i = 1; i < chain.size(); ++i) {
      path_of_edge_[chain[i]] = pid;
      std::vector<std::int64_t> ls;
      for (const TemporalLabel& l : topo.labels(order_[chain[i]])) {
        ls.push_back(l.departure);
      }
      labels.push_back(std::move(ls));
    }
    paths_.push_back(PathRec{std::move(verts), depth_[chain.front()],
                             TemporalPath(labels)});
  }

  tour_.reserve(2 * n);
  struct Frame {
    std::size_t x;
    std::size_t next = 0;
  };
  for (std::size_t r = 0; r < n; ++r) {
    if (parent_[r]) continue;
    std::vector<Frame> st{{r, 0}};
    first_[r] = tour_.size();
    tour_.push_back(r);
    while (!st.empty()) {
      Frame& f = st.back();
      if (f.next < kids[f.x].size()) {
        std::size_t c = kids[f.x][f.next++];
        first_[c] = tour_.size();
        tour_.push_back(c);
        st.push_back(Frame{c, 0});
      } else {
        st.pop_back();
        if (!st.empty()) tour_.push_back(st.back().x);
      }
    }
  }
  std::size_t len = tour_.size();
  if (len > 0) {
    std::size_t levels = std::bit_width(len);
    table_.resize(levels);
    table_[0].resize(len);
    for (std::size_t i = 0; i < len; ++i) table_[0][i] = i;
    for (std::size_t k = 1; k < levels; ++k) {
      std::size_t half = std::size_t(1) << (k - 1);
      table_[k].resize(len - (half << 1) + 1);
      for (std::size_t i = 0; i + (half << 1) <= len; ++i) {
        std::size_t a = table_[k - 1][i];
        std::size_t b = table_[k - 1][i + half];
        table_[k][i] = depth_[tour_[a]] <= depth_[tour_[b]] ? a : b;
      }
    }
  }
}

std::size_t HldForest::dense(VertexId v, const char* what) const {
  auto it = id_.find(v);
  if (it == id_.end()) {
    fail(std::string(what) + ": unknown vertex " + std::to_string(v));
  }
  return it->second;
}

std::size_t HldForest::euler_lca(std::size_t u, std::size_t v) const {
  std::size_t l = first_[u], r = first_[v];
  if (l > r) std::swap(l, r);
  std::size_t k = std::bit_width(r - l + 1) - 1;
  std::size_t a = table_[k][l];
  std::size_t b = table_[k][r + 1 - (std::size_t(1) << k)];
  return tour_[depth_[tour_[a]] <= depth_[tour_[b]] ? a : b];
}

std::optional<VertexId> HldForest::lca(VertexId u, VertexId v) const {
  std::size_t du = dense(u, "lca");
  std::size_t dv = dense(v, "lca");
  if (root_[du] != root_[dv]) return std::nullopt;
  return order_[euler_lca(du, dv)];
}

void HldForest::collect(std::size_t low, std::size_t high,
                        std::vector<Segment>& out) const {
  std::size_t cur = low;
  while (cur != high) {
    std::size_t pid = path_of_edge_[cur];
    const PathRec& p = paths_[pid];
    std::size_t climb = depth_[high] >= p.top_depth ? high : id_.at(p.verts[0]);
    out.push_back(Segment{pid, pos_in(pid, cur), pos_in(pid, climb)});
    cur = climb;
  }
}

void HldForest::add_label(VertexId v, std::int64_t label) {
  std::size_t dv = dense(v, "add_label");
  if (!parent_[dv]) fail("add_label: vertex is a root");
  std::size_t pid = path_of_edge_[dv];
  paths_[pid].tp.add_label(pos_in(pid, dv) - 1, label);
  ++label_count_[dv];
}

void HldForest::delete_label(VertexId v, std::int64_t label) {
  std::size_t dv = dense(v, "delete_label");
  if (!parent_[dv]) fail("delete_label: vertex is a root");
  if (label_count_[dv] == 1) fail("delete_label: last label requires cut");
  std::size_t pid = path_of_edge_[dv];
  paths_[pid].tp.delete_label(pos_in(pid, dv) - 1, label);
  --label_count_[dv];
}

TimeValue HldForest::ea(VertexId uu, VertexId vv, TimeValue t) {
  std::size_t u = dense(uu, "ea");
  std::size_t v = dense(vv, "ea");
  last_segments_ = 0;
  if (u == v) return t;
  if (root_[u] != root_[v]) return TimeValue::pos_inf();
  std::size_t w = euler_lca(u, v);
  std::vector<Segment> up, down;
  collect(u, w, up);
  collect(v, w, down);
  last_segments_ = up.size() + down.size();
  TimeValue a = t;
  for (const Segment& s : up) {
    if (a.is_pos_inf()) return a;
    a = paths_[s.path].tp.ea(s.from, s.to, a);
  }
  for (auto it = down.rbegin(); it != down.rend(); ++it) {
    if (a.is_pos_inf()) return a;
    a = paths_[it->path].tp.ea(it->to, it->from, a);
  }
  return a;
}

TimeValue HldForest::ld(VertexId uu, VertexId vv, TimeValue t) {
  std::size_t u = dense(uu, "ld");
  std::size_t v = dense(vv, "ld");
  last_segments_ = 0;
  if (u == v) return t;
  if (root_[u] != root_[v]) return TimeValue::neg_inf();
  std::size_t w = euler_lca(u, v);
  std::vector<Segment> up, down;
  collect(u, w, up);
  collect(v, w, down);
  last_segments_ = up.size() + down.size();
  TimeValue a = t;
  // Latest departure composes target-end first: the segment nearest v, then
  // outward, and only then the upward run from u processed nearest w first.
  for (const Segment& s : down) {
    if (a.is_neg_inf()) return a;
    a = paths_[s.path].tp.ld(s.to, s.from, a);
  }
  for (auto it = up.rbegin(); it != up.rend(); ++it) {
    if (a.is_neg_inf()) return a;
    a = paths_[it->path].tp.ld(it->from, it->to, a);
  }
  return a;
}

bool HldForest::reach(VertexId u, VertexId v, TimeValue t_dep,
                      TimeValue t_arr) {
  if (dense(u, "reach") == dense(v, "reach")) {
    last_segments_ = 0;
    return t_dep <= t_arr;
  }
  TimeValue a = ea(u, v, t_dep);
  // +inf <= +inf would claim reachability where no path exists.
  return a.is_finite() && a <= t_arr;
}

}  // namespace tempora
