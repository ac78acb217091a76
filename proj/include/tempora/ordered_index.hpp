#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tempora/time_value.hpp"

namespace tempora {

namespace detail {

// splitmix64; priorities are drawn from a fixed stream so index shapes are
// reproducible across runs.
inline std::uint64_t next_priority(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

template <typename K>
concept HasArrival = requires(const K& k) {
  { k.arrival } -> std::convertible_to<std::int64_t>;
  { k.departure } -> std::convertible_to<std::int64_t>;
};

}  // namespace detail

// Ordered dictionary on totally ordered keys, backed by a treap.  Subtree
// sizes support rank selection; when the key type carries departure/arrival
// pairs the treap additionally aggregates the minimum arrival per subtree,
// which powers the two pair queries used by latency-aware structures.
template <typename Key, typename Value>
class OrderedIndex {
 public:
  struct Entry {
    Key key;
    Value value;
  };

  bool empty() const { return root_ == kNil; }
  std::size_t size() const { return root_ == kNil ? 0 : nodes_[root_].size; }
  std::uint64_t comparisons() const { return comparisons_; }

  void insert(const Key& key, const Value& value) {
    if (lookup(key) != kNil) {
      throw std::invalid_argument("OrderedIndex::insert: duplicate key");
    }
    std::uint32_t nn = alloc(key, value);
    root_ = insert_rec(root_, nn);
  }

  void erase(const Key& key) {
    if (lookup(key) == kNil) {
      throw std::invalid_argument("OrderedIndex::erase: missing key");
    }
    root_ = erase_rec(root_, key);
  }

  std::optional<Value> find(const Key& key) const {
    std::uint32_t n = lookup(key);
    if (n == kNil) return std::nullopt;
    return nodes_[n].value;
  }
  bool contains(const Key& key) const { return lookup(key) != kNil; }

  // Smallest entry with key > bound (strict) or >= bound.
  std::optional<Entry> succ(const Key& bound, bool strict) const {
    std::uint32_t best = kNil;
    for (std::uint32_t cur = root_; cur != kNil;) {
      int c = cmp(bound, nodes_[cur].key);
      if (c < 0 || (!strict && c == 0)) {
        best = cur;
        cur = nodes_[cur].ch[0];
      } else {
        cur = nodes_[cur].ch[1];
      }
    }
    return entry_of(best);
  }

  // Largest entry with key < bound (strict) or <= bound.
  std::optional<Entry> pred(const Key& bound, bool strict) const {
    std::uint32_t best = kNil;
    for (std::uint32_t cur = root_; cur != kNil;) {
      int c = cmp(nodes_[cur].key, bound);
      if (c < 0 || (!strict && c == 0)) {
        best = cur;
        cur = nodes_[cur].ch[1];
      } else {
        cur = nodes_[cur].ch[0];
      }
    }
    return entry_of(best);
  }

  std::optional<Entry> first() const {
    std::uint32_t cur = root_;
    if (cur == kNil) return std::nullopt;
    while (nodes_[cur].ch[0] != kNil) cur = nodes_[cur].ch[0];
    return entry_of(cur);
  }
  std::optional<Entry> last() const {
    std::uint32_t cur = root_;
    if (cur == kNil) return std::nullopt;
    while (nodes_[cur].ch[1] != kNil) cur = nodes_[cur].ch[1];
    return entry_of(cur);
  }

  // rank is 0-based in key order.
  Entry select(std::size_t rank) const {
    if (rank >= size()) {
      throw std::invalid_argument("OrderedIndex::select: rank out of range");
    }
    std::uint32_t cur = root_;
    for (;;) {
      std::size_t ls = subtree_size(nodes_[cur].ch[0]);
      if (rank < ls) {
        cur = nodes_[cur].ch[0];
      } else if (rank == ls) {
        return *entry_of(cur);
      } else {
        rank -= ls + 1;
        cur = nodes_[cur].ch[1];
      }
    }
  }

  template <typename F>
  void for_each(F&& f) const {
    std::vector<std::uint32_t> stack;
    std::uint32_t cur = root_;
    while (cur != kNil || !stack.empty()) {
      while (cur != kNil) {
        stack.push_back(cur);
        cur = nodes_[cur].ch[0];
      }
      cur = stack.back();
      stack.pop_back();
      f(nodes_[cur].key, nodes_[cur].value);
      cur = nodes_[cur].ch[1];
    }
  }

  // Among entries with departure >= min_departure: minimum arrival, ties
  // resolved towards the largest departure.  Requires pair keys.
  std::optional<Entry> min_arrival(TimeValue min_departure) const
    requires detail::HasArrival<Key>
  {
    std::int64_t m = kNoArrival;
    for (std::uint32_t cur = root_; cur != kNil;) {
      if (dep_qualifies(cur, min_departure)) {
        m = std::min(m, nodes_[cur].key.arrival);
        if (nodes_[cur].ch[1] != kNil) {
          m = std::min(m, nodes_[nodes_[cur].ch[1]].min_arr);
        }
        cur = nodes_[cur].ch[0];
      } else {
        cur = nodes_[cur].ch[1];
      }
    }
    if (m == kNoArrival) return std::nullopt;
    // Second pass: rightmost qualifying entry achieving arrival m, i.e. the
    // one with the largest departure.
    for (std::uint32_t cur = root_; cur != kNil;) {
      if (dep_qualifies(cur, min_departure)) {
        std::uint32_t r = nodes_[cur].ch[1];
        if (r != kNil && nodes_[r].min_arr == m) {
          cur = r;
        } else if (nodes_[cur].key.arrival == m) {
          return entry_of(cur);
        } else {
          cur = nodes_[cur].ch[0];
        }
      } else {
        cur = nodes_[cur].ch[1];
      }
    }
    throw std::logic_error("OrderedIndex::min_arrival: aggregate mismatch");
  }

  // Among entries with arrival < arrival_strict_upper: the one with the
  // largest departure (ties towards the largest arrival).
  std::optional<Entry> max_departure_below(TimeValue arrival_strict_upper) const
    requires detail::HasArrival<Key>
  {
    for (std::uint32_t cur = root_; cur != kNil;) {
      std::uint32_t r = nodes_[cur].ch[1];
      if (r != kNil && arr_below(nodes_[r].min_arr, arrival_strict_upper)) {
        cur = r;
      } else if (arr_below(nodes_[cur].key.arrival, arrival_strict_upper)) {
        return entry_of(cur);
      } else {
        cur = nodes_[cur].ch[0];
      }
    }
    return std::nullopt;
  }

 private:
  static constexpr std::uint32_t kNil = static_cast<std::uint32_t>(-1);
  static constexpr std::int64_t kNoArrival = INT64_MAX;

  struct Node {
    Key key;
    Value value;
    std::uint64_t priority = 0;
    std::uint32_t ch[2] = {kNil, kNil};
    std::uint32_t size = 1;
    std::int64_t min_arr = kNoArrival;  // unused unless Key has pairs
  };

  int cmp(const Key& a, const Key& b) const {
    ++comparisons_;
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
  }

  std::size_t subtree_size(std::uint32_t n) const {
    return n == kNil ? 0 : nodes_[n].size;
  }

  void update(std::uint32_t n) {
    Node& nd = nodes_[n];
    nd.size = 1 + static_cast<std::uint32_t>(subtree_size(nd.ch[0]) +
                                             subtree_size(nd.ch[1]));
    if constexpr (detail::HasArrival<Key>) {
      nd.min_arr = nd.key.arrival;
      for (int s = 0; s < 2; ++s) {
        if (nd.ch[s] != kNil) {
          nd.min_arr = std::min(nd.min_arr, nodes_[nd.ch[s]].min_arr);
        }
      }
    }
  }

  std::optional<Entry> entry_of(std::uint32_t n) const {
    if (n == kNil) return std::nullopt;
    return Entry{nodes_[n].key, nodes_[n].value};
  }

  bool dep_qualifies(std::uint32_t n, TimeValue min_departure) const {
    return TimeValue::finite(nodes_[n].key.departure) >= min_departure;
  }
  static bool arr_below(std::int64_t arr, TimeValue bound) {
    return TimeValue::finite(arr) < bound;
  }

  std::uint32_t lookup(const Key& key) const {
    std::uint32_t cur = root_;
    while (cur != kNil) {
      int c = cmp(key, nodes_[cur].key);
      if (c == 0) return cur;
      cur = nodes_[cur].ch[c < 0 ? 0 : 1];
    }
    return kNil;
  }

  std::uint32_t alloc(const Key& key, const Value& value) {
    std::uint32_t n;
    if (free_ != kNil) {
      n = free_;
      free_ = nodes_[n].ch[0];
      nodes_[n] = Node{};
    } else {
      n = static_cast<std::uint32_t>(nodes_.size());
      nodes_.emplace_back();
    }
    nodes_[n].key = key;
    nodes_[n].value = value;
    nodes_[n].priority = detail::next_priority(prio_state_);
    update(n);
    return n;
  }

  void release(std::uint32_t n) {
    nodes_[n].ch[0] = free_;
    free_ = n;
  }

  // Splits into keys < key and keys > key; key itself must be absent.
  void split(std::uint32_t t, const Key& key, std::uint32_t& l,
             std::uint32_t& r) {
    if (t == kNil) {
      l = r = kNil;
      return;
    }
    if (cmp(nodes_[t].key, key) < 0) {
      split(nodes_[t].ch[1], key, nodes_[t].ch[1], r);
      l = t;
      update(t);
    } else {
      split(nodes_[t].ch[0], key, l, nodes_[t].ch[0]);
      r = t;
      update(t);
    }
  }

  std::uint32_t merge(std::uint32_t a, std::uint32_t b) {
    if (a == kNil) return b;
    if (b == kNil) return a;
    if (nodes_[a].priority > nodes_[b].priority) {
      nodes_[a].ch[1] = merge(nodes_[a].ch[1], b);
      update(a);
      return a;
    }
    nodes_[b].ch[0] = merge(a, nodes_[b].ch[0]);
    update(b);
    return b;
  }

  std::uint32_t insert_rec(std::uint32_t t, std::uint32_t nn) {
    if (t == kNil) return nn;
    if (nodes_[nn].priority > nodes_[t].priority) {
      split(t, nodes_[nn].key, nodes_[nn].ch[0], nodes_[nn].ch[1]);
      update(nn);
      return nn;
    }
    int side = cmp(nodes_[nn].key, nodes_[t].key) < 0 ? 0 : 1;
    nodes_[t].ch[side] = insert_rec(nodes_[t].ch[side], nn);
    update(t);
    return t;
  }

  std::uint32_t erase_rec(std::uint32_t t, const Key& key) {
    int c = cmp(key, nodes_[t].key);
    if (c == 0) {
      std::uint32_t m = merge(nodes_[t].ch[0], nodes_[t].ch[1]);
      release(t);
      return m;
    }
    int side = c < 0 ? 0 : 1;
    nodes_[t].ch[side] = erase_rec(nodes_[t].ch[side], key);
    update(t);
    return t;
  }

  std::vector<Node> nodes_;
  std::uint32_t root_ = kNil;
  std::uint32_t free_ = kNil;
  std::uint64_t prio_state_ = 0x74656d706f726178ull;
  mutable std::uint64_t comparisons_ = 0;
};

// Block key in the latency-free setting: nodes of one block ordered by
// (label, child vertex).
struct BlockKeyPlain {
  std::int64_t label = 0;
  VertexId vertex = 0;

  friend constexpr bool operator==(const BlockKeyPlain&,
                                   const BlockKeyPlain&) = default;
  friend constexpr auto operator<=>(const BlockKeyPlain& a,
                                    const BlockKeyPlain& b) {
    if (auto c = a.label <=> b.label; c != 0) return c;
    return a.vertex <=> b.vertex;
  }
};

// Block key with latencies: (arrival, departure, child vertex).
struct BlockKeyLat {
  std::int64_t arrival = 0;
  std::int64_t departure = 0;
  VertexId vertex = 0;

  friend constexpr bool operator==(const BlockKeyLat&,
                                   const BlockKeyLat&) = default;
  friend constexpr auto operator<=>(const BlockKeyLat& a,
                                    const BlockKeyLat& b) {
    if (auto c = a.arrival <=> b.arrival; c != 0) return c;
    if (auto c = a.departure <=> b.departure; c != 0) return c;
    return a.vertex <=> b.vertex;
  }
};

}  // namespace tempora
