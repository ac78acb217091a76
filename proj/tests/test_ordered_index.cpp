#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tempora/ordered_index.hpp"
#include "tempora/workload.hpp"

using namespace tempora;

namespace {

using IntIndex = OrderedIndex<std::int64_t, int>;
using PairIndex = OrderedIndex<TemporalLabel, int>;

// Reference answers by linear scan over a std::map model.
template <typename K, typename V>
std::optional<typename OrderedIndex<K, V>::Entry> scan_succ(
    const std::map<K, V>& m, const K& bound, bool strict) {
  for (const auto& [k, v] : m) {
    if (strict ? bound < k : !(k < bound)) return {{k, v}};
  }
  return std::nullopt;
}

template <typename K, typename V>
std::optional<typename OrderedIndex<K, V>::Entry> scan_pred(
    const std::map<K, V>& m, const K& bound, bool strict) {
  std::optional<typename OrderedIndex<K, V>::Entry> best;
  for (const auto& [k, v] : m) {
    if (strict ? k < bound : !(bound < k)) best = {{k, v}};
  }
  return best;
}

template <typename E>
void check_same(const std::optional<E>& got, const std::optional<E>& want) {
  REQUIRE(got.has_value() == want.has_value());
  if (got) {
    REQUIRE(got->key == want->key);
    REQUIRE(got->value == want->value);
  }
}

}  // namespace

TEST_CASE("insert, erase and lookup preconditions") {
  IntIndex ix;
  CHECK(ix.empty());
  ix.insert(4, 40);
  ix.insert(-2, -20);
  CHECK(ix.size() == 2);
  CHECK_THROWS_AS(ix.insert(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(ix.erase(5), std::invalid_argument);
  CHECK(ix.find(4) == 40);
  CHECK_FALSE(ix.find(5).has_value());
  CHECK(ix.contains(-2));
  ix.erase(4);
  CHECK_FALSE(ix.contains(4));
  CHECK(ix.size() == 1);
  CHECK_THROWS_AS(ix.select(1), std::invalid_argument);
  CHECK(ix.select(0).key == -2);
}

TEST_CASE("random integer workload matches a scan model") {
  IntIndex ix;
  std::map<std::int64_t, int> model;
  SplitMix64 rng(7);

  for (int step = 0; step < 4000; ++step) {
    std::int64_t key = rng.range(-40, 40);
    if (rng.unit() < 0.6) {
      if (!model.count(key)) {
        int val = static_cast<int>(rng.below(1000));
        ix.insert(key, val);
        model[key] = val;
      }
    } else if (model.count(key)) {
      ix.erase(key);
      model.erase(key);
    }

    REQUIRE(ix.size() == model.size());
    std::int64_t bound = rng.range(-45, 45);
    for (bool strict : {false, true}) {
      check_same(ix.succ(bound, strict), scan_succ(model, bound, strict));
      check_same(ix.pred(bound, strict), scan_pred(model, bound, strict));
    }
    if (!model.empty()) {
      check_same(ix.first(),
                 std::optional<IntIndex::Entry>(
                     {model.begin()->first, model.begin()->second}));
      check_same(ix.last(), std::optional<IntIndex::Entry>(
                                {model.rbegin()->first, model.rbegin()->second}));
      std::size_t rank = rng.below(model.size());
      auto it = model.begin();
      std::advance(it, rank);
      REQUIRE(ix.select(rank).key == it->first);
      REQUIRE(ix.select(rank).value == it->second);
    } else {
      CHECK_FALSE(ix.first().has_value());
      CHECK_FALSE(ix.last().has_value());
    }
  }

  std::vector<std::int64_t> in_order;
  ix.for_each([&](const std::int64_t& k, const int&) { in_order.push_back(k); });
  std::vector<std::int64_t> want;
  for (const auto& [k, v] : model) {
    (void)v;
    want.push_back(k);
  }
  CHECK(in_order == want);
}

TEST_CASE("pair aggregates match a scan model") {
  PairIndex ix;
  std::map<TemporalLabel, int> model;
  SplitMix64 rng(99);

  auto scan_min_arrival = [&](TimeValue min_dep) {
    std::optional<PairIndex::Entry> best;
    for (const auto& [k, v] : model) {
      if (TimeValue::finite(k.departure) < min_dep) continue;
      if (!best || k.arrival < best->key.arrival ||
          (k.arrival == best->key.arrival &&
           k.departure > best->key.departure)) {
        best = {{k, v}};
      }
    }
    return best;
  };
  auto scan_max_dep_below = [&](TimeValue arr_upper) {
    std::optional<PairIndex::Entry> best;
    for (const auto& [k, v] : model) {
      if (!(TimeValue::finite(k.arrival) < arr_upper)) continue;
      if (!best || k.departure > best->key.departure ||
          (k.departure == best->key.departure &&
           k.arrival > best->key.arrival)) {
        best = {{k, v}};
      }
    }
    return best;
  };

  for (int step = 0; step < 4000; ++step) {
    std::int64_t dep = rng.range(-12, 12);
    TemporalLabel key{dep, dep + rng.range(0, 8)};
    if (rng.unit() < 0.6) {
      if (!model.count(key)) {
        int val = static_cast<int>(rng.below(1000));
        ix.insert(key, val);
        model[key] = val;
      }
    } else if (model.count(key)) {
      ix.erase(key);
      model.erase(key);
    }

    for (TimeValue b : {TimeValue::neg_inf(), TimeValue::pos_inf(),
                        TimeValue::finite(rng.range(-15, 25))}) {
      check_same(ix.min_arrival(b), scan_min_arrival(b));
      check_same(ix.max_departure_below(b), scan_max_dep_below(b));
    }
  }
}

TEST_CASE("block key orderings") {
  CHECK(BlockKeyPlain{3, 1} < BlockKeyPlain{3, 2});
  CHECK(BlockKeyPlain{3, 9} < BlockKeyPlain{4, 0});
  // Latency blocks order by arrival first, then departure, then vertex.
  CHECK(BlockKeyLat{5, 9, 0} < BlockKeyLat{6, 0, 0});
  CHECK(BlockKeyLat{5, 2, 0} < BlockKeyLat{5, 3, 0});
  CHECK(BlockKeyLat{5, 3, 1} < BlockKeyLat{5, 3, 2});
  // The probe vertex sorts after every real vertex with the same pair.
  CHECK(BlockKeyLat{5, 3, 7} < BlockKeyLat{5, 3, kProbeVertex});
  CHECK(BlockKeyPlain{5, 7} < BlockKeyPlain{5, kProbeVertex});
}
