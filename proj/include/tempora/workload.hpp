#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tempora/counters.hpp"
#include "tempora/forest_topology.hpp"
#include "tempora/trace.hpp"

namespace tempora {

// Deterministic 64-bit generator (splitmix64); identical seeds give
// identical streams on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  std::uint64_t below(std::uint64_t bound);               // [0, bound)
  std::int64_t range(std::int64_t lo, std::int64_t hi);   // [lo, hi]
  double unit();                                          // [0, 1)

 private:
  std::uint64_t state_;
};

enum class EngineKind { kForest, kLatency, kHld, kPath, kOracle };

std::optional<EngineKind> engine_from_name(const std::string& name);
std::string engine_name(EngineKind kind);

// Uniform backend wrapper: updates return nothing, queries return their
// output token.  Precondition violations throw std::invalid_argument and
// leave the backend unchanged.
class Engine {
 public:
  virtual ~Engine() = default;

  virtual std::optional<std::string> apply(const TraceOp& op) = 0;
  // Structural self-check; empty means consistent.
  virtual std::vector<std::string> validate() { return {}; }
  // Work counters of the most recent update, when the backend tracks them.
  virtual UpdateCounters last_update() const { return {}; }
};

std::unique_ptr<Engine> make_engine(EngineKind kind);

struct GenParams {
  std::uint32_t n = 16;         // vertex budget
  std::size_t ops = 128;        // total ops emitted, queries included
  std::int64_t label_min = -50;
  std::int64_t label_max = 50;
  enum class Latency { kNone, kUniform, kRandom };
  Latency latency = Latency::kNone;
  std::int64_t latency_d = 0;   // uniform delay, or max delay when random
  enum class Regime { kMixed, kIncremental, kDecremental };
  Regime regime = Regime::kMixed;
  double query_share = 0.3;
};

// Precondition-respecting trace, identical for identical (seed, params).
// Decremental traces start with a build prefix and then only delete.
std::vector<TraceOp> generate(std::uint64_t seed, const GenParams& p);

struct DiffResult {
  bool ok = true;
  std::size_t op_index = 0;
  std::string kind;    // "answer", "validate" or "rejected"
  std::string detail;
};

// Runs the chosen engine and the oracle in lockstep over a generated
// trace; validates the engine after the run, and after every update when
// `validate_every_op` is set.
DiffResult difftest(std::uint64_t seed, const GenParams& p, EngineKind kind,
                    bool validate_every_op);

struct BenchParams {
  std::uint64_t seed = 1;
  GenParams gen;
  bool series = false;  // latency engine: add label-insertion scaling rows
};

// CSV with the exact header
// engine,op,count,total_ns,p50_ns,p99_ns,fixparent_calls,rewires
// and one row per op kind that occurs.
std::string bench_csv(EngineKind kind, const BenchParams& p);

}  // namespace tempora
