#include "tempora/workload.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "tempora/hld_forest.hpp"
#include "tempora/oracle.hpp"
#include "tempora/temporal_forest.hpp"
#include "tempora/temporal_forest_latency.hpp"
#include "tempora/temporal_path.hpp"

namespace tempora {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

std::int64_t plain_label(const TemporalLabel& l) {
  if (!l.is_plain()) {
    throw std::invalid_argument("latency labels unsupported by this engine");
  }
  return l.departure;
}

void require_plain(const TraceOp& op) {
  std::visit(Overload{[](const OpLink& o) { plain_label(o.label); },
                      [](const OpAddLabel& o) { plain_label(o.label); },
                      [](const OpDelLabel& o) { plain_label(o.label); },
                      [](const auto&) {}},
             op);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  return bound == 0 ? 0 : next() % bound;
}

std::int64_t SplitMix64::range(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(
                  below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double SplitMix64::unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::optional<EngineKind> engine_from_name(const std::string& name) {
  if (name == "forest") return EngineKind::kForest;
  if (name == "latency") return EngineKind::kLatency;
  if (name == "hld") return EngineKind::kHld;
  if (name == "path") return EngineKind::kPath;
  if (name == "oracle") return EngineKind::kOracle;
  return std::nullopt;
}

std::string engine_name(EngineKind kind) {
  switch (kind) {
    case EngineKind::kForest: return "forest";
    case EngineKind::kLatency: return "latency";
    case EngineKind::kHld: return "hld";
    case EngineKind::kPath: return "path";
    case EngineKind::kOracle: return "oracle";
  }
  return "?";
}

namespace {

class OracleEngine final : public Engine {
 public:
  std::optional<std::string> apply(const TraceOp& op) override {
    using R = std::optional<std::string>;
    return std::visit(
        Overload{
            [&](const OpQueryEa& o) -> R {
              return oracle::ea(topo_, o.u, o.v, o.t).str();
            },
            [&](const OpQueryLd& o) -> R {
              return oracle::ld(topo_, o.u, o.v, o.t).str();
            },
            [&](const OpQueryReach& o) -> R {
              return bool_str(oracle::reach(topo_, o.u, o.v, o.t_dep, o.t_arr));
            },
            [&](const auto&) -> R {
              topo_apply(topo_, op);
              return std::nullopt;
            }},
        op);
  }

 private:
  ForestTopology topo_;
};

class ForestEngine final : public Engine {
 public:
  std::optional<std::string> apply(const TraceOp& op) override {
    using R = std::optional<std::string>;
    return std::visit(
        Overload{[&](const OpAddVertex& o) -> R {
                   f_.add_vertex(o.v);
                   return std::nullopt;
                 },
                 [&](const OpDelVertex& o) -> R {
                   f_.delete_vertex(o.v);
                   return std::nullopt;
                 },
                 [&](const OpLink& o) -> R {
                   f_.link(o.u, o.v, plain_label(o.label));
                   return std::nullopt;
                 },
                 [&](const OpCut& o) -> R {
                   f_.cut(o.v);
                   return std::nullopt;
                 },
                 [&](const OpAddLabel& o) -> R {
                   f_.add_label(o.v, plain_label(o.label));
                   return std::nullopt;
                 },
                 [&](const OpDelLabel& o) -> R {
                   f_.delete_label(o.v, plain_label(o.label));
                   return std::nullopt;
                 },
                 [&](const OpQueryEa& o) -> R {
                   return f_.ea(o.u, o.v, o.t).str();
                 },
                 [&](const OpQueryLd& o) -> R {
                   return f_.ld(o.u, o.v, o.t).str();
                 },
                 [&](const OpQueryReach& o) -> R {
                   return bool_str(f_.reach(o.u, o.v, o.t_dep, o.t_arr));
                 }},
        op);
  }

  std::vector<std::string> validate() override {
    std::vector<std::string> out;
    ForestTopology topo = f_.export_topology();
    for (std::string& m :
         oracle::validate(topo, f_.snapshot(TemporalForest::Twin::kForward))) {
      out.push_back("forward: " + m);
    }
    for (std::string& m : oracle::validate(
             topo.mirrored(), f_.snapshot(TemporalForest::Twin::kMirror))) {
      out.push_back("mirror: " + m);
    }
    return out;
  }

  UpdateCounters last_update() const override { return f_.last_update(); }

 private:
  TemporalForest f_;
};

class LatencyEngine final : public Engine {
 public:
  std::optional<std::string> apply(const TraceOp& op) override {
    using R = std::optional<std::string>;
    return std::visit(
        Overload{[&](const OpAddVertex& o) -> R {
                   f_.add_vertex(o.v);
                   return std::nullopt;
                 },
                 [&](const OpDelVertex& o) -> R {
                   f_.delete_vertex(o.v);
                   return std::nullopt;
                 },
                 [&](const OpLink& o) -> R {
                   f_.link(o.u, o.v, o.label);
                   return std::nullopt;
                 },
                 [&](const OpCut& o) -> R {
                   f_.cut(o.v);
                   return std::nullopt;
                 },
                 [&](const OpAddLabel& o) -> R {
                   f_.add_label(o.v, o.label);
                   return std::nullopt;
                 },
                 [&](const OpDelLabel& o) -> R {
                   f_.delete_label(o.v, o.label);
                   return std::nullopt;
                 },
                 [&](const OpQueryEa& o) -> R {
                   return f_.ea(o.u, o.v, o.t).str();
                 },
                 [&](const OpQueryLd& o) -> R {
                   return f_.ld(o.u, o.v, o.t).str();
                 },
                 [&](const OpQueryReach& o) -> R {
                   return bool_str(f_.reach(o.u, o.v, o.t_dep, o.t_arr));
                 }},
        op);
  }

  std::vector<std::string> validate() override {
    std::vector<std::string> out;
    ForestTopology topo = f_.export_topology();
    for (std::string& m : oracle::validate(
             topo, f_.snapshot(TemporalForestLatency::Twin::kForward))) {
      out.push_back("forward: " + m);
    }
    for (std::string& m : oracle::validate(
             topo.mirrored(),
             f_.snapshot(TemporalForestLatency::Twin::kMirror))) {
      out.push_back("mirror: " + m);
    }
    return out;
  }

  UpdateCounters last_update() const override { return f_.last_update(); }

 private:
  TemporalForestLatency f_;
};

class HldEngine final : public Engine {
 public:
  std::optional<std::string> apply(const TraceOp& op) override {
    using R = std::optional<std::string>;
    if (is_query(op)) {
      if (!h_) h_ = std::make_unique<HldForest>(topo_);
      return std::visit(
          Overload{[&](const OpQueryEa& o) -> R {
                     return h_->ea(o.u, o.v, o.t).str();
                   },
                   [&](const OpQueryLd& o) -> R {
                     return h_->ld(o.u, o.v, o.t).str();
                   },
                   [&](const OpQueryReach& o) -> R {
                     return bool_str(h_->reach(o.u, o.v, o.t_dep, o.t_arr));
                   },
                   [&](const auto&) -> R { return std::nullopt; }},
          op);
    }
    require_plain(op);
    topo_apply(topo_, op);
    std::visit(Overload{[&](const OpAddLabel& o) {
                          if (h_) h_->add_label(o.v, o.label.departure);
                        },
                        [&](const OpDelLabel& o) {
                          if (h_) h_->delete_label(o.v, o.label.departure);
                        },
                        // Topology changed: decompose afresh on next query.
                        [&](const auto&) { h_.reset(); }},
               op);
    return std::nullopt;
  }

 private:
  ForestTopology topo_;
  std::unique_ptr<HldForest> h_;
};

class PathEngine final : public Engine {
 public:
  std::optional<std::string> apply(const TraceOp& op) override {
    using R = std::optional<std::string>;
    if (is_query(op)) {
      return std::visit(
          Overload{[&](const OpQueryEa& o) -> R { return ea(o.u, o.v, o.t).str(); },
                   [&](const OpQueryLd& o) -> R { return ld(o.u, o.v, o.t).str(); },
                   [&](const OpQueryReach& o) -> R {
                     if (o.u == o.v) {
                       check_vertex(o.u);
                       return bool_str(o.t_dep <= o.t_arr);
                     }
                     TimeValue a = ea(o.u, o.v, o.t_dep);
                     return bool_str(a.is_finite() && a <= o.t_arr);
                   },
                   [&](const auto&) -> R { return std::nullopt; }},
          op);
    }
    require_plain(op);
    topo_apply(topo_, op);
    std::visit(Overload{[&](const OpAddLabel& o) {
                          if (built_ && tp_) {
                            tp_->add_label(edge_of(o.v), o.label.departure);
                          }
                        },
                        [&](const OpDelLabel& o) {
                          if (built_ && tp_) {
                            tp_->delete_label(edge_of(o.v), o.label.departure);
                          }
                        },
                        [&](const auto&) {
                          built_ = false;
                          tp_.reset();
                        }},
               op);
    return std::nullopt;
  }

 private:
  void check_vertex(VertexId v) const {
    if (!topo_.has_vertex(v)) {
      throw std::invalid_argument("unknown vertex " + std::to_string(v));
    }
  }

  std::size_t edge_of(VertexId v) const {
    return std::min(pos_.at(v), pos_.at(*topo_.parent(v)));
  }

  // The current forest must be one simple chain (plus isolated vertices).
  void ensure_built() {
    if (built_) return;
    pos_.clear();
    chain_.clear();
    tp_.reset();
    std::map<VertexId, std::vector<VertexId>> adj;
    for (const auto& [v, rec] : topo_.vertices()) {
      if (rec.parent) {
        adj[v].push_back(*rec.parent);
        adj[*rec.parent].push_back(v);
      }
    }
    if (adj.empty()) {
      built_ = true;
      return;
    }
    std::optional<VertexId> start;
    std::size_t ends = 0;
    for (const auto& [v, ns] : adj) {
      if (ns.size() > 2) throw std::invalid_argument("forest is not a path");
      if (ns.size() == 1) {
        ++ends;
        if (!start) start = v;
      }
    }
    if (ends != 2) throw std::invalid_argument("forest is not a path");
    std::optional<VertexId> prev;
    VertexId cur = *start;
    chain_.push_back(cur);
    for (;;) {
      std::optional<VertexId> next;
      for (VertexId w : adj.at(cur)) {
        if (!prev || w != *prev) {
          next = w;
          break;
        }
      }
      if (!next) break;
      prev = cur;
      cur = *next;
      chain_.push_back(cur);
    }
    if (chain_.size() != adj.size()) {
      throw std::invalid_argument("forest is not a path");
    }
    for (std::size_t i = 0; i < chain_.size(); ++i) pos_[chain_[i]] = i;
    std::vector<std::vector<std::int64_t>> labels;
    for (std::size_t i = 0; i + 1 < chain_.size(); ++i) {
      VertexId child = topo_.parent(chain_[i]) == chain_[i + 1] ? chain_[i]
                                                                : chain_[i + 1];
      std::vector<std::int64_t> ls;
      for (const TemporalLabel& l : topo_.labels(child)) {
        ls.push_back(l.departure);
      }
      labels.push_back(std::move(ls));
    }
    tp_ = std::make_unique<TemporalPath>(labels);
    built_ = true;
  }

  TimeValue ea(VertexId u, VertexId v, TimeValue t) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) return t;
    ensure_built();
    auto iu = pos_.find(u);
    auto iv = pos_.find(v);
    if (iu == pos_.end() || iv == pos_.end()) return TimeValue::pos_inf();
    return tp_->ea(iu->second, iv->second, t);
  }

  TimeValue ld(VertexId u, VertexId v, TimeValue t) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) return t;
    ensure_built();
    auto iu = pos_.find(u);
    auto iv = pos_.find(v);
    if (iu == pos_.end() || iv == pos_.end()) return TimeValue::neg_inf();
    return tp_->ld(iu->second, iv->second, t);
  }

  ForestTopology topo_;
  bool built_ = false;
  std::vector<VertexId> chain_;
  std::map<VertexId, std::size_t> pos_;
  std::unique_ptr<TemporalPath> tp_;
};

}  // namespace

std::unique_ptr<Engine> make_engine(EngineKind kind) {
  switch (kind) {
    case EngineKind::kForest: return std::make_unique<ForestEngine>();
    case EngineKind::kLatency: return std::make_unique<LatencyEngine>();
    case EngineKind::kHld: return std::make_unique<HldEngine>();
    case EngineKind::kPath: return std::make_unique<PathEngine>();
    case EngineKind::kOracle: return std::make_unique<OracleEngine>();
  }
  throw std::invalid_argument("unknown engine");
}

namespace {

struct Roles {
  std::vector<VertexId> all, roots, isolated, cuttable, multi, nonroots;
};

Roles scan_roles(const ForestTopology& topo) {
  std::map<VertexId, std::size_t> kids;
  for (const auto& [v, rec] : topo.vertices()) {
    if (rec.parent) ++kids[*rec.parent];
  }
  Roles r;
  for (const auto& [v, rec] : topo.vertices()) {
    r.all.push_back(v);
    if (!rec.parent) {
      r.roots.push_back(v);
      if (!kids.count(v)) r.isolated.push_back(v);
    } else {
      r.nonroots.push_back(v);
      if (rec.labels.size() == 1) {
        r.cuttable.push_back(v);
      } else {
        r.multi.push_back(v);
      }
    }
  }
  return r;
}

TemporalLabel gen_label(SplitMix64& rng, const GenParams& p) {
  std::int64_t dep = rng.range(p.label_min, p.label_max);
  std::int64_t d = 0;
  switch (p.latency) {
    case GenParams::Latency::kNone: break;
    case GenParams::Latency::kUniform: d = p.latency_d; break;
    case GenParams::Latency::kRandom: d = rng.range(0, p.latency_d); break;
  }
  return TemporalLabel{dep, dep + d};
}

TimeValue gen_time(SplitMix64& rng, const GenParams& p) {
  std::uint64_t roll = rng.below(16);
  if (roll == 0) return TimeValue::pos_inf();
  if (roll == 1) return TimeValue::neg_inf();
  std::int64_t w = p.label_max - p.label_min + 1;
  return TimeValue::finite(
      rng.range(p.label_min - w / 4, p.label_max + w / 4 + p.latency_d));
}

TraceOp gen_query(SplitMix64& rng, const Roles& r, const GenParams& p) {
  VertexId u = r.all[rng.below(r.all.size())];
  VertexId v = r.all[rng.below(r.all.size())];
  switch (rng.below(5)) {
    case 0:
    case 1:
      return OpQueryEa{u, v, gen_time(rng, p)};
    case 2:
    case 3:
      return OpQueryLd{u, v, gen_time(rng, p)};
    default: {
      TimeValue td = gen_time(rng, p);
      TimeValue ta;
      if (td.is_finite() && rng.below(2) == 0) {
        std::int64_t w = p.label_max - p.label_min + 1;
        ta = TimeValue::finite(td.value() + rng.range(0, w + p.latency_d));
      } else {
        ta = gen_time(rng, p);
      }
      return OpQueryReach{u, v, td, ta};
    }
  }
}

// Picks a fresh label for edge e_v, or nullopt when collisions persist.
std::optional<TemporalLabel> fresh_label(SplitMix64& rng, const GenParams& p,
                                         const ForestTopology& topo,
                                         VertexId v) {
  for (int tries = 0; tries < 16; ++tries) {
    TemporalLabel l = gen_label(rng, p);
    if (!topo.labels(v).count(l)) return l;
  }
  return std::nullopt;
}

const TemporalLabel& nth_label(const std::set<TemporalLabel>& ls,
                               std::size_t idx) {
  auto it = ls.begin();
  std::advance(it, idx);
  return *it;
}

void check_params(const GenParams& p) {
  if (p.n < 1 || p.ops < 1 || p.label_min > p.label_max || p.latency_d < 0 ||
      p.query_share < 0.0 || p.query_share > 1.0) {
    throw std::invalid_argument("infeasible workload params");
  }
}

}  // namespace

std::vector<TraceOp> generate(std::uint64_t seed, const GenParams& p) {
  check_params(p);
  SplitMix64 rng(seed);
  ForestTopology topo;
  std::vector<TraceOp> ops;
  ops.reserve(p.ops);

  auto emit = [&](const TraceOp& op) {
    if (!is_query(op)) topo_apply(topo, op);
    ops.push_back(op);
  };

  if (p.regime == GenParams::Regime::kDecremental) {
    std::uint32_t n_use = std::min<std::uint64_t>(
        p.n, std::max<std::uint64_t>(2, p.ops / 4));
    for (std::uint32_t i = 0; i < n_use && ops.size() < p.ops; ++i) {
      VertexId v = topo.add_vertex();
      ops.push_back(OpAddVertex{v});
    }
    for (std::uint32_t v = 1; v < n_use && ops.size() < p.ops; ++v) {
      if (!topo.has_vertex(v)) break;
      if (rng.unit() < 0.85) {
        VertexId target = static_cast<VertexId>(rng.below(v));
        emit(OpLink{v, target, gen_label(rng, p)});
      }
    }
    Roles built = scan_roles(topo);
    while (ops.size() < p.ops / 2 && !built.nonroots.empty()) {
      VertexId v = built.nonroots[rng.below(built.nonroots.size())];
      if (auto l = fresh_label(rng, p, topo, v)) {
        emit(OpAddLabel{v, *l});
      }
    }
    while (ops.size() < p.ops) {
      Roles r = scan_roles(topo);
      if (rng.unit() < p.query_share) {
        emit(gen_query(rng, r, p));
        continue;
      }
      struct Cand {
        char kind;
        std::uint64_t weight;
      };
      std::vector<Cand> cands;
      if (!r.multi.empty()) cands.push_back({'d', 3});
      if (!r.cuttable.empty()) cands.push_back({'c', 2});
      if (!r.isolated.empty() && r.all.size() > 1) cands.push_back({'v', 1});
      if (cands.empty()) {
        emit(gen_query(rng, r, p));
        continue;
      }
      std::uint64_t total = 0;
      for (const Cand& c : cands) total += c.weight;
      std::uint64_t roll = rng.below(total);
      char kind = 0;
      for (const Cand& c : cands) {
        if (roll < c.weight) {
          kind = c.kind;
          break;
        }
        roll -= c.weight;
      }
      if (kind == 'd') {
        VertexId v = r.multi[rng.below(r.multi.size())];
        const auto& ls = topo.labels(v);
        emit(OpDelLabel{v, nth_label(ls, rng.below(ls.size()))});
      } else if (kind == 'c') {
        emit(OpCut{r.cuttable[rng.below(r.cuttable.size())]});
      } else {
        emit(OpDelVertex{r.isolated[rng.below(r.isolated.size())]});
      }
    }
    return ops;
  }

  bool incremental = p.regime == GenParams::Regime::kIncremental;
  while (ops.size() < p.ops) {
    Roles r = scan_roles(topo);
    if (!r.all.empty() && rng.unit() < p.query_share) {
      emit(gen_query(rng, r, p));
      continue;
    }
    struct Cand {
      char kind;
      std::uint64_t weight;
    };
    std::vector<Cand> cands;
    if (topo.vertex_count() < p.n) cands.push_back({'a', incremental ? 3u : 2u});
    if (r.roots.size() >= 2) cands.push_back({'l', 3});
    if (!r.nonroots.empty()) cands.push_back({'+', 4});
    if (!incremental) {
      if (!r.isolated.empty() && r.all.size() > 1) cands.push_back({'v', 1});
      if (!r.cuttable.empty()) cands.push_back({'c', 1});
      if (!r.multi.empty()) cands.push_back({'-', 2});
    }
    if (cands.empty()) {
      if (!r.all.empty()) emit(gen_query(rng, r, p));
      continue;
    }
    std::uint64_t total = 0;
    for (const Cand& c : cands) total += c.weight;
    std::uint64_t roll = rng.below(total);
    char kind = 0;
    for (const Cand& c : cands) {
      if (roll < c.weight) {
        kind = c.kind;
        break;
      }
      roll -= c.weight;
    }
    switch (kind) {
      case 'a': {
        VertexId v = topo.add_vertex();
        ops.push_back(OpAddVertex{v});
        break;
      }
      case 'l': {
        VertexId u = r.roots[rng.below(r.roots.size())];
        std::vector<VertexId> targets;
        for (VertexId v : r.all) {
          if (topo.root_of(v) != u) targets.push_back(v);
        }
        emit(OpLink{u, targets[rng.below(targets.size())],
                    gen_label(rng, p)});
        break;
      }
      case '+': {
        VertexId v = r.nonroots[rng.below(r.nonroots.size())];
        if (auto l = fresh_label(rng, p, topo, v)) {
          emit(OpAddLabel{v, *l});
        } else {
          emit(gen_query(rng, r, p));
        }
        break;
      }
      case 'v':
        emit(OpDelVertex{r.isolated[rng.below(r.isolated.size())]});
        break;
      case 'c':
        emit(OpCut{r.cuttable[rng.below(r.cuttable.size())]});
        break;
      case '-': {
        VertexId v = r.multi[rng.below(r.multi.size())];
        const auto& ls = topo.labels(v);
        emit(OpDelLabel{v, nth_label(ls, rng.below(ls.size()))});
        break;
      }
      default: break;
    }
  }
  return ops;
}

DiffResult difftest(std::uint64_t seed, const GenParams& p, EngineKind kind,
                    bool validate_every_op) {
  std::vector<TraceOp> ops = generate(seed, p);
  std::unique_ptr<Engine> eng = make_engine(kind);
  std::unique_ptr<Engine> orc = make_engine(EngineKind::kOracle);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    std::optional<std::string> ea, oa;
    try {
      ea = eng->apply(ops[i]);
    } catch (const std::exception& e) {
      return {false, i, "rejected", engine_name(kind) + ": " + e.what()};
    }
    try {
      oa = orc->apply(ops[i]);
    } catch (const std::exception& e) {
      return {false, i, "rejected", std::string("oracle: ") + e.what()};
    }
    if (ea != oa) {
      return {false, i, "answer",
              "engine=" + ea.value_or("<none>") +
                  " oracle=" + oa.value_or("<none>")};
    }
    if (validate_every_op && !is_query(ops[i])) {
      std::vector<std::string> probs = eng->validate();
      if (!probs.empty()) return {false, i, "validate", probs.front()};
    }
  }
  std::vector<std::string> probs = eng->validate();
  if (!probs.empty()) return {false, ops.size(), "validate", probs.front()};
  return {};
}

namespace {

struct OpStats {
  std::uint64_t count = 0;
  std::uint64_t total_ns = 0;
  std::vector<std::uint64_t> samples;
  std::uint64_t fix_parent = 0;
  std::uint64_t rewires = 0;
};

std::uint64_t percentile(std::vector<std::uint64_t>& samples, int p) {
  std::sort(samples.begin(), samples.end());
  std::size_t idx = (samples.size() - 1) * static_cast<std::size_t>(p) / 100;
  return samples[idx];
}

void append_row(std::ostringstream& out, const std::string& engine,
                const std::string& op, OpStats& s) {
  out << engine << ',' << op << ',' << s.count << ',' << s.total_ns << ','
      << percentile(s.samples, 50) << ',' << percentile(s.samples, 99) << ','
      << s.fix_parent << ',' << s.rewires << '\n';
}

}  // namespace

std::string bench_csv(EngineKind kind, const BenchParams& p) {
  constexpr const char* kOpNames[] = {"addv", "delv", "link", "cut", "addl",
                                      "dell", "ea",   "ld",   "reach"};
  std::vector<TraceOp> ops = generate(p.seed, p.gen);
  std::unique_ptr<Engine> eng = make_engine(kind);
  std::map<std::size_t, OpStats> stats;
  for (const TraceOp& op : ops) {
    auto t0 = std::chrono::steady_clock::now();
    eng->apply(op);
    auto t1 = std::chrono::steady_clock::now();
    auto ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    OpStats& s = stats[op.index()];
    ++s.count;
    s.total_ns += ns;
    s.samples.push_back(ns);
    if (!is_query(op)) {
      UpdateCounters c = eng->last_update();
      s.fix_parent += c.fix_parent_calls;
      s.rewires += c.rewires;
    }
  }
  std::ostringstream out;
  out << "engine,op,count,total_ns,p50_ns,p99_ns,fixparent_calls,rewires\n";
  for (auto& [idx, s] : stats) {
    append_row(out, engine_name(kind), kOpNames[idx], s);
  }
  if (p.series && kind == EngineKind::kLatency) {
    for (int k = 10; k <= 15; ++k) {
      std::uint64_t m = 1ull << k;
      SplitMix64 rng(p.seed ^ (0x9e3779b97f4a7c15ull * k));
      TemporalForestLatency f;
      VertexId a = f.add_vertex();
      VertexId b = f.add_vertex();
      VertexId c = f.add_vertex();
      f.link(b, a, TemporalLabel{0, 0});
      f.link(c, b, TemporalLabel{0, 0});
      std::set<TemporalLabel> used[2] = {{TemporalLabel{0, 0}},
                                        {TemporalLabel{0, 0}}};
      OpStats s;
      for (std::uint64_t i = 0; i < m; ++i) {
        int which = rng.below(2) == 0 ? 0 : 1;
        VertexId tgt = which == 0 ? b : c;
        TemporalLabel l{0, 0};
        do {
          std::int64_t dep = rng.range(-(1 << 20), 1 << 20);
          l = TemporalLabel{dep, dep + rng.range(0, 64)};
        } while (used[which].count(l));
        used[which].insert(l);
        auto t0 = std::chrono::steady_clock::now();
        f.add_label(tgt, l);
        auto t1 = std::chrono::steady_clock::now();
        auto ns = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                .count());
        ++s.count;
        s.total_ns += ns;
        s.samples.push_back(ns);
        s.fix_parent += f.last_update().fix_parent_calls;
        s.rewires += f.last_update().rewires;
      }
      append_row(out, engine_name(kind), "addl_m" + std::to_string(m), s);
    }
  }
  return out.str();
}

}  // namespace tempora
