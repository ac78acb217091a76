#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <vector>

#include "tempora/oracle.hpp"
#include "tempora/temporal_forest_latency.hpp"
#include "tempora/workload.hpp"

using namespace tempora;
using Twin = TemporalForestLatency::Twin;

namespace {

void require_valid(TemporalForestLatency& f) {
  ForestTopology topo = f.export_topology();
  auto fwd = oracle::validate(topo, f.snapshot(Twin::kForward));
  if (!fwd.empty()) FAIL(fwd.front());
  auto mir = oracle::validate(topo.mirrored(), f.snapshot(Twin::kMirror));
  if (!mir.empty()) FAIL(mir.front());
}

bool snap_eq(const StructureSnapshot& a, const StructureSnapshot& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (a.nodes[i].key != b.nodes[i].key) return false;
    if (a.nodes[i].parent != b.nodes[i].parent) return false;
    if (a.nodes[i].weight != b.nodes[i].weight) return false;
  }
  return a.heads == b.heads;
}

// root(0) <- mid(1) <- leaf(2); parent edge of mid carries three pairs.
void build_hop_chain(TemporalForestLatency& f) {
  for (VertexId v = 0; v < 3; ++v) f.add_vertex(v);
  f.link(1, 0, TemporalLabel{3, 9});
  f.add_label(1, TemporalLabel{4, 6});
  f.add_label(1, TemporalLabel{5, 5});
  f.link(2, 1, TemporalLabel{1, 4});
  f.add_label(2, TemporalLabel{2, 3});
}

}  // namespace

TEST_CASE("next hop minimises arrival with ties to the latest departure") {
  TemporalForestLatency f;
  build_hop_chain(f);
  auto nh = f.next_hop(Twin::kForward, 2, 3);
  REQUIRE(nh.has_value());
  CHECK(*nh == (TemporalLabel{5, 5}));
  CHECK_FALSE(f.next_hop(Twin::kForward, 2, 6).has_value());

  TemporalForestLatency g;
  for (VertexId v = 0; v < 3; ++v) g.add_vertex(v);
  g.link(1, 0, TemporalLabel{4, 6});
  g.add_label(1, TemporalLabel{5, 6});
  g.link(2, 1, TemporalLabel{0, 0});
  auto tie = g.next_hop(Twin::kForward, 2, 4);
  REQUIRE(tie.has_value());
  CHECK(*tie == (TemporalLabel{5, 6}));
}

TEST_CASE("successor case split") {
  TemporalForestLatency f;
  for (VertexId v = 0; v < 3; ++v) f.add_vertex(v);
  f.link(1, 0, TemporalLabel{2, 3});
  f.add_label(1, TemporalLabel{5, 8});
  f.link(2, 1, TemporalLabel{0, 1});
  f.add_label(2, TemporalLabel{1, 2});

  // Strict successor (1,2) arrives at 2 <= NextHop departure 2: red.
  auto red = f.sigma(Twin::kForward, 2, TemporalLabel{0, 1});
  REQUIRE(red.has_value());
  CHECK(red->target == (FNodeKey{2, TemporalLabel{1, 2}}));
  CHECK(red->weight == 0);

  // No strict successor: the NextHop pair on the parent edge, blue.
  auto blue = f.sigma(Twin::kForward, 2, TemporalLabel{1, 2});
  REQUIRE(blue.has_value());
  CHECK(blue->target == (FNodeKey{1, TemporalLabel{2, 3}}));
  CHECK(blue->weight == 1);

  // Root parent: only the in-block strict successor applies.
  auto top = f.sigma(Twin::kForward, 1, TemporalLabel{2, 3});
  REQUIRE(top.has_value());
  CHECK(top->target == (FNodeKey{1, TemporalLabel{5, 8}}));
  CHECK(top->weight == 0);
  CHECK_FALSE(f.sigma(Twin::kForward, 1, TemporalLabel{5, 8}).has_value());

  // Head dictionaries list roots and blue-linked nodes per block.
  StructureSnapshot s = f.snapshot(Twin::kForward);
  REQUIRE(s.latency);
  REQUIRE(s.heads.count(1) == 1);
  CHECK(s.heads.at(1) ==
        std::vector<FNodeKey>{FNodeKey{2, TemporalLabel{1, 2}}});
  require_valid(f);
}

TEST_CASE("queries across latencies") {
  TemporalForestLatency f;
  build_hop_chain(f);
  CHECK(f.ea(2, 0, TimeValue::finite(0)) == TimeValue::finite(5));
  CHECK(f.ea(2, 0, TimeValue::finite(2)) == TimeValue::finite(5));
  CHECK(f.ea(2, 0, TimeValue::finite(3)) == TimeValue::pos_inf());
  CHECK(f.ld(2, 0, TimeValue::finite(4)) == TimeValue::neg_inf());
  CHECK(f.ld(2, 0, TimeValue::finite(5)) == TimeValue::finite(2));
  CHECK(f.ea(1, 1, TimeValue::finite(7)) == TimeValue::finite(7));

  // Every direction must match the greedy reference on the exported copy.
  ForestTopology topo = f.export_topology();
  for (VertexId u = 0; u < 3; ++u) {
    for (VertexId v = 0; v < 3; ++v) {
      for (std::int64_t t = -2; t <= 10; ++t) {
        TimeValue q = TimeValue::finite(t);
        REQUIRE(f.ea(u, v, q) == oracle::ea(topo, u, v, q));
        REQUIRE(f.ld(u, v, q) == oracle::ld(topo, u, v, q));
        REQUIRE(f.reach(u, v, q, TimeValue::finite(t + 3)) ==
                oracle::reach(topo, u, v, q, TimeValue::finite(t + 3)));
      }
    }
  }
}

TEST_CASE("update preconditions") {
  TemporalForestLatency f;
  build_hop_chain(f);
  CHECK_THROWS_AS(f.add_label(1, TemporalLabel{4, 6}), std::invalid_argument);
  CHECK_THROWS_AS(f.add_label(1, TemporalLabel{6, 2}), std::invalid_argument);
  CHECK_THROWS_AS(f.add_label(0, TemporalLabel{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(f.delete_label(1, TemporalLabel{9, 9}),
                  std::invalid_argument);
  CHECK_THROWS_AS(f.cut(1), std::invalid_argument);  // three labels
  f.delete_label(1, TemporalLabel{3, 9});
  f.delete_label(1, TemporalLabel{4, 6});
  CHECK_THROWS_AS(f.delete_label(1, TemporalLabel{5, 5}),
                  std::invalid_argument);  // last label requires cut
  CHECK_THROWS_AS(f.link(2, 0, TemporalLabel{0, 0}),
                  std::invalid_argument);  // not a root
  require_valid(f);
}

TEST_CASE("round-trip restores both twins including heads") {
  TemporalForestLatency f;
  build_hop_chain(f);
  StructureSnapshot fwd = f.snapshot(Twin::kForward);
  StructureSnapshot mir = f.snapshot(Twin::kMirror);
  f.add_label(2, TemporalLabel{3, 5});
  f.delete_label(2, TemporalLabel{3, 5});
  CHECK(snap_eq(f.snapshot(Twin::kForward), fwd));
  CHECK(snap_eq(f.snapshot(Twin::kMirror), mir));
}

TEST_CASE("uniform latency updates stay within constant budgets") {
  TemporalForestLatency f;
  for (VertexId v = 0; v < 3; ++v) f.add_vertex(v);
  f.link(1, 0, TemporalLabel{0, 3});
  f.link(2, 1, TemporalLabel{1, 4});
  SplitMix64 rng(77);
  std::set<TemporalLabel> present[2];
  present[0].insert(TemporalLabel{0, 3});
  present[1].insert(TemporalLabel{1, 4});

  std::uint64_t max_fp = 0, max_rw = 0, max_ops = 0;
  for (int step = 0; step < 800; ++step) {
    int which = static_cast<int>(rng.below(2));
    VertexId tgt = which == 0 ? 1 : 2;
    std::int64_t dep = rng.range(-300, 300);
    TemporalLabel l{dep, dep + 3};
    if (present[which].count(l)) {
      if (present[which].size() < 2) continue;
      f.delete_label(tgt, l);
      present[which].erase(l);
    } else {
      f.add_label(tgt, l);
      present[which].insert(l);
    }
    const UpdateCounters& u = f.last_update();
    max_fp = std::max(max_fp, u.fix_parent_calls);
    max_rw = std::max(max_rw, u.rewires);
    max_ops = std::max(max_ops, u.forest_ops + f.last_backing_ops());
    if (step % 50 == 0) require_valid(f);
  }
  CHECK(max_fp <= 3);
  CHECK(max_rw <= 3);
  CHECK(max_ops <= 12);
  require_valid(f);
}

TEST_CASE("differential runs against the oracle with per-op validation") {
  GenParams p;
  p.n = 12;
  p.ops = 120;
  p.label_min = -30;
  p.label_max = 30;
  p.latency = GenParams::Latency::kRandom;
  p.latency_d = 6;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    DiffResult r = difftest(seed, p, EngineKind::kLatency, true);
    REQUIRE_MESSAGE(r.ok, (r.kind + ": " + r.detail));
  }
  p.regime = GenParams::Regime::kIncremental;
  for (std::uint64_t seed = 11; seed <= 14; ++seed) {
    DiffResult r = difftest(seed, p, EngineKind::kLatency, true);
    REQUIRE_MESSAGE(r.ok, (r.kind + ": " + r.detail));
  }
  p.regime = GenParams::Regime::kDecremental;
  for (std::uint64_t seed = 21; seed <= 24; ++seed) {
    DiffResult r = difftest(seed, p, EngineKind::kLatency, true);
    REQUIRE_MESSAGE(r.ok, (r.kind + ": " + r.detail));
  }
}
