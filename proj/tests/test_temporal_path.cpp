#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <vector>

#include "tempora/oracle.hpp"
#include "tempora/temporal_path.hpp"
#include "tempora/workload.hpp"

using namespace tempora;
using Copy = TemporalPath::Copy;

namespace {

constexpr Copy kCopies[] = {Copy::kFwd, Copy::kBwd, Copy::kNegFwd,
                           Copy::kNegBwd};

bool snap_eq(const StructureSnapshot& a, const StructureSnapshot& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (a.nodes[i].key != b.nodes[i].key) return false;
    if (a.nodes[i].parent != b.nodes[i].parent) return false;
    if (a.nodes[i].weight != b.nodes[i].weight) return false;
  }
  return a.heads == b.heads;
}

void require_consistent(TemporalPath& p) {
  for (Copy c : kCopies) {
    auto report = oracle::validate_chain(p.copy_labels(c), p.snapshot(c));
    if (!report.empty()) FAIL(report.front());
  }
}

std::vector<std::vector<TemporalLabel>> as_pairs(
    const std::vector<std::set<std::int64_t>>& model) {
  std::vector<std::vector<TemporalLabel>> out;
  for (const auto& s : model) {
    out.emplace_back();
    for (std::int64_t l : s) out.back().push_back(TemporalLabel::plain(l));
  }
  return out;
}

}  // namespace

TEST_CASE("three-edge example answers") {
  TemporalPath p({{2, 5}, {4, 6}, {1, 6}});
  CHECK(p.vertex_count() == 4);
  CHECK(p.label_count() == 6);
  CHECK(p.ea(0, 3, TimeValue::finite(1)) == TimeValue::finite(6));
  CHECK(p.ea(0, 3, TimeValue::finite(6)) == TimeValue::pos_inf());
  CHECK(p.ld(0, 3, TimeValue::finite(6)) == TimeValue::finite(5));
  CHECK(p.ea(3, 0, TimeValue::finite(0)) == TimeValue::finite(5));
  CHECK(p.ld(3, 0, TimeValue::finite(6)) == TimeValue::finite(1));
  CHECK(p.ea(1, 1, TimeValue::finite(42)) == TimeValue::finite(42));
  CHECK(p.ld(2, 2, TimeValue::neg_inf()) == TimeValue::neg_inf());
  require_consistent(p);
}

TEST_CASE("degenerate shapes") {
  TemporalPath lone(std::vector<std::vector<std::int64_t>>{});
  CHECK(lone.vertex_count() == 1);
  CHECK(lone.ea(0, 0, TimeValue::finite(9)) == TimeValue::finite(9));
  CHECK_THROWS_AS(lone.ea(0, 1, TimeValue::finite(0)), std::invalid_argument);
  CHECK_THROWS_AS(lone.add_label(0, 1), std::invalid_argument);

  TemporalPath one(std::vector<std::vector<std::int64_t>>{{7}});
  for (Copy c : kCopies) {
    StructureSnapshot s = one.snapshot(c);
    REQUIRE(s.nodes.size() == 1);
    CHECK_FALSE(s.nodes[0].parent.has_value());
  }
  CHECK(one.ea(0, 1, TimeValue::finite(7)) == TimeValue::finite(7));
  CHECK(one.ea(0, 1, TimeValue::finite(8)) == TimeValue::pos_inf());
  CHECK(one.ld(0, 1, TimeValue::finite(7)) == TimeValue::finite(7));
}

TEST_CASE("successor introspection") {
  TemporalPath p({{2}, {4}});
  auto s = p.sigma(Copy::kFwd, 0, 2);
  REQUIRE(s.has_value());
  CHECK(s->edge == 1);
  CHECK(s->label == 4);
  CHECK(s->weight == 1);  // crossing to the next edge
  CHECK_FALSE(p.sigma(Copy::kFwd, 1, 4).has_value());
  // In the negated copy 4 cannot follow 2 (-4 < -2), so (-2, e0) is a root.
  CHECK_FALSE(p.sigma(Copy::kNegFwd, 0, -2).has_value());

  // Within one edge the successor stays intra-edge with weight 0.
  TemporalPath q({{2, 5}});
  auto r = q.sigma(Copy::kFwd, 0, 2);
  REQUIRE(r.has_value());
  CHECK(r->edge == 0);
  CHECK(r->label == 5);
  CHECK(r->weight == 0);
}

TEST_CASE("fix_parent is idempotent on a consistent structure") {
  TemporalPath p({{2, 5}, {4, 6}, {1, 6}});
  for (Copy c : kCopies) {
    StructureSnapshot before = p.snapshot(c);
    auto labels = p.copy_labels(c);
    for (std::size_t e = 0; e < labels.size(); ++e) {
      for (const TemporalLabel& l : labels[e]) {
        p.fix_parent(c, e, l.departure);
      }
    }
    CHECK(snap_eq(p.snapshot(c), before));
  }
}

TEST_CASE("update preconditions") {
  TemporalPath p({{2, 5}, {}, {1}});
  CHECK_THROWS_AS(p.add_label(0, 2), std::invalid_argument);     // duplicate
  CHECK_THROWS_AS(p.delete_label(1, 3), std::invalid_argument);  // empty edge
  CHECK_THROWS_AS(p.delete_label(0, 3), std::invalid_argument);  // missing
  CHECK_THROWS_AS(p.add_label(3, 1), std::invalid_argument);     // no edge 3
  // Deleting the only label of an edge is allowed on a fixed path.
  p.delete_label(2, 1);
  CHECK(p.ea(2, 3, TimeValue::neg_inf()) == TimeValue::pos_inf());
  require_consistent(p);
}

TEST_CASE("add and delete round-trip restores the structure") {
  TemporalPath p({{2, 5}, {4, 6}, {1, 6}});
  StructureSnapshot before[4];
  for (Copy c : kCopies) before[static_cast<int>(c)] = p.snapshot(c);
  p.add_label(1, 5);
  p.delete_label(1, 5);
  for (Copy c : kCopies) {
    CHECK(snap_eq(p.snapshot(c), before[static_cast<int>(c)]));
  }
}

TEST_CASE("random updates stay consistent and answer like the oracle") {
  const std::size_t edges = 6;
  std::vector<std::set<std::int64_t>> model(edges);
  TemporalPath p{std::vector<std::vector<std::int64_t>>(edges)};
  SplitMix64 rng(1234);

  for (int step = 0; step < 400; ++step) {
    std::size_t e = rng.below(edges);
    std::int64_t l = rng.range(-8, 8);
    if (model[e].count(l)) {
      p.delete_label(e, l);
      model[e].erase(l);
    } else {
      p.add_label(e, l);
      model[e].insert(l);
    }

    const UpdateCounters& u = p.last_update();
    REQUIRE(u.fix_parent_calls <= 3);
    REQUIRE(u.forest_ops <= 12);

    if (step % 8 == 0) require_consistent(p);

    auto pairs = as_pairs(model);
    for (int q = 0; q < 6; ++q) {
      std::size_t i = rng.below(edges + 1);
      std::size_t j = rng.below(edges + 1);
      TimeValue t = TimeValue::finite(rng.range(-10, 10));
      REQUIRE(p.ea(i, j, t) == oracle::path_ea(pairs, i, j, t));
      REQUIRE(p.ld(i, j, t) == oracle::path_ld(pairs, i, j, t));
    }
  }
  require_consistent(p);
}
