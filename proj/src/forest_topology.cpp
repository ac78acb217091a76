#include "tempora/forest_topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace tempora {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

const ForestTopology::VertexRecord& ForestTopology::record(
    VertexId v, const char* what) const {
  auto it = verts_.find(v);
  if (it == verts_.end()) {
    fail(std::string(what) + ": unknown vertex " + std::to_string(v));
  }
  return it->second;
}

VertexId ForestTopology::root_of(VertexId v) const {
  const VertexRecord* r = &record(v, "root_of");
  while (r->parent) {
    v = *r->parent;
    r = &verts_.at(v);
  }
  return v;
}

std::optional<std::size_t> ForestTopology::hop_distance(VertexId u,
                                                        VertexId v) const {
  auto w = lowest_common_ancestor(u, v);
  if (!w) return std::nullopt;
  std::size_t d = 0;
  for (VertexId x = u; x != *w; x = *verts_.at(x).parent) ++d;
  for (VertexId x = v; x != *w; x = *verts_.at(x).parent) ++d;
  return d;
}

std::optional<VertexId> ForestTopology::lowest_common_ancestor(
    VertexId u, VertexId v) const {
  record(u, "lca");
  record(v, "lca");
  std::set<VertexId> seen;
  for (std::optional<VertexId> x = u; x; x = verts_.at(*x).parent) {
    seen.insert(*x);
  }
  for (std::optional<VertexId> x = v; x; x = verts_.at(*x).parent) {
    if (seen.count(*x)) return *x;
  }
  return std::nullopt;
}

std::vector<VertexId> ForestTopology::upward_edges(VertexId u,
                                                   VertexId a) const {
  std::vector<VertexId> out;
  VertexId x = u;
  while (x != a) {
    auto p = verts_.at(x).parent;
    if (!p) fail("upward_edges: target is not an ancestor");
    out.push_back(x);
    x = *p;
  }
  return out;
}

VertexId ForestTopology::add_vertex() {
  VertexId v = 0;
  for (const auto& [id, rec] : verts_) {
    (void)rec;
    if (id != v) break;
    ++v;
  }
  verts_[v] = VertexRecord{};
  return v;
}

void ForestTopology::add_vertex(VertexId v) {
  if (v == kProbeVertex) fail("add_vertex: reserved vertex id");
  if (verts_.count(v)) fail("add_vertex: vertex already exists");
  verts_[v] = VertexRecord{};
}

void ForestTopology::remove_vertex(VertexId v) {
  const VertexRecord& r = record(v, "remove_vertex");
  if (r.parent) fail("remove_vertex: vertex has a parent");
  for (const auto& [id, rec] : verts_) {
    if (rec.parent == v) fail("remove_vertex: vertex has children");
    (void)id;
  }
  verts_.erase(v);
}

void ForestTopology::link(VertexId u, VertexId v, const TemporalLabel& l) {
  const VertexRecord& ru = record(u, "link");
  record(v, "link");
  check_label(l, "link");
  if (ru.parent) fail("link: child endpoint is not a root");
  if (root_of(v) == u) fail("link: endpoints share a tree");
  verts_[u].parent = v;
  verts_[u].labels = {l};
  ++label_count_;
}

void ForestTopology::cut(VertexId v) {
  const VertexRecord& r = record(v, "cut");
  if (!r.parent) fail("cut: vertex is a root");
  if (r.labels.size() != 1) fail("cut: edge carries more than one label");
  verts_[v].parent.reset();
  verts_[v].labels.clear();
  --label_count_;
}

void ForestTopology::add_label(VertexId v, const TemporalLabel& l) {
  const VertexRecord& r = record(v, "add_label");
  check_label(l, "add_label");
  if (!r.parent) fail("add_label: vertex is a root");
  if (r.labels.count(l)) fail("add_label: label already present");
  verts_[v].labels.insert(l);
  ++label_count_;
}

void ForestTopology::remove_label(VertexId v, const TemporalLabel& l) {
  const VertexRecord& r = record(v, "remove_label");
  if (!r.parent) fail("remove_label: vertex is a root");
  if (!r.labels.count(l)) fail("remove_label: label not present");
  if (r.labels.size() == 1) fail("remove_label: last label requires cut");
  verts_[v].labels.erase(l);
  --label_count_;
}

ForestTopology ForestTopology::mirrored() const {
  ForestTopology out;
  out.verts_ = verts_;
  out.label_count_ = label_count_;
  for (auto& [v, rec] : out.verts_) {
    (void)v;
    std::set<TemporalLabel> m;
    for (const TemporalLabel& l : rec.labels) m.insert(l.mirrored());
    rec.labels = std::move(m);
  }
  return out;
}

void topo_apply(ForestTopology& topo, const TraceOp& op) {
  std::visit(
      [&topo](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, OpAddVertex>) {
          topo.add_vertex(o.v);
        } else if constexpr (std::is_same_v<T, OpDelVertex>) {
          topo.remove_vertex(o.v);
        } else if constexpr (std::is_same_v<T, OpLink>) {
          topo.link(o.u, o.v, o.label);
        } else if constexpr (std::is_same_v<T, OpCut>) {
          topo.cut(o.v);
        } else if constexpr (std::is_same_v<T, OpAddLabel>) {
          topo.add_label(o.v, o.label);
        } else if constexpr (std::is_same_v<T, OpDelLabel>) {
          topo.remove_label(o.v, o.label);
        } else {
          throw std::invalid_argument("topo_apply: op is a query");
        }
      },
      op);
}

}  // namespace tempora
