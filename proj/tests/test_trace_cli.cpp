#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tempora/trace.hpp"
#include "tempora/workload.hpp"

using namespace tempora;
namespace fs = std::filesystem;

namespace {

constexpr EngineKind kAllEngines[] = {EngineKind::kForest, EngineKind::kLatency,
                                      EngineKind::kHld, EngineKind::kPath,
                                      EngineKind::kOracle};

std::vector<std::string> run_ops(EngineKind kind,
                                 const std::vector<TraceOp>& ops) {
  auto engine = make_engine(kind);
  std::vector<std::string> out;
  for (const TraceOp& op : ops) {
    if (auto line = engine->apply(op)) out.push_back(*line);
  }
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("tempora_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = scratch_dir() / ("out" + std::to_string(counter));
  fs::path err = scratch_dir() / ("err" + std::to_string(counter));
  ++counter;
  std::string cmd = std::string(TEMPORA_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_trace(const std::string& text) {
  static int counter = 0;
  fs::path p = scratch_dir() / ("trace" + std::to_string(counter++));
  std::ofstream f(p, std::ios::binary);
  f << text;
  return p;
}

}  // namespace

TEST_CASE("parsing skips comments and tracks line numbers") {
  std::string text =
      "# header comment\n"
      "\n"
      "addv 0\n"
      "addv 1   # trailing comment\n"
      "link 1 0 3\n"
      "ea 1 0 1\n";
  std::istringstream in(text);
  std::vector<trace::ParsedOp> ops = trace::parse_lines(in);
  REQUIRE(ops.size() == 4);
  CHECK(ops[0].line == 3);
  CHECK(ops[1].line == 4);
  CHECK(ops[2].line == 5);
  CHECK(ops[3].line == 6);
  CHECK(std::holds_alternative<OpQueryEa>(ops[3].op));
}

TEST_CASE("parse and canonical format round-trip") {
  std::string text =
      "# build\n"
      "addv 0\n"
      "addv 1\n"
      "link 1 0 3\n"
      "addl 1 5\n"
      "dell 1 3\n"
      "ea 1 0 -inf\n"
      "ld 1 0 +inf\n"
      "reach 1 0 0 7\n"
      "cut 1\n"
      "delv 1\n";
  std::vector<TraceOp> ops = trace::parse(text);
  REQUIRE(ops.size() == 10);
  std::vector<std::string> want = {
      "addv 0",     "addv 1",  "link 1 0 3",  "addl 1 5", "dell 1 3",
      "ea 1 0 -inf", "ld 1 0 +inf", "reach 1 0 0 7", "cut 1", "delv 1"};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    CHECK(trace::format_op(ops[i], false) == want[i]);
  }
  // Reparsing the canonical form yields the same canonical form.
  std::string joined;
  for (const auto& w : want) joined += w + "\n";
  std::vector<TraceOp> again = trace::parse(joined);
  REQUIRE(again.size() == ops.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(trace::format_op(again[i], false) == want[i]);
  }
}

TEST_CASE("latency forms carry explicit arrivals") {
  std::vector<TraceOp> ops = trace::parse("link 1 0 3 7\naddl 1 4\n");
  REQUIRE(ops.size() == 2);
  CHECK(trace::format_op(ops[0], true) == "link 1 0 3 7");
  CHECK(trace::format_op(ops[1], true) == "addl 1 4 4");  // omitted a means a=l
  CHECK_THROWS_AS(trace::format_op(ops[0], false), std::invalid_argument);
}

TEST_CASE("parse errors carry one-based line numbers") {
  auto expect_error = [](const std::string& text, std::size_t line) {
    try {
      trace::parse(text);
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const trace::ParseError& e) {
      CHECK(e.line == line);
    }
  };
  expect_error("addv x\n", 1);
  expect_error("# ok\naddv 0\nbogus 1 2\n", 3);
  expect_error("addv 0\naddv\n", 2);            // missing argument
  expect_error("addv 0 1\n", 1);                // extra argument
  expect_error("ea 0 0\n", 1);                  // missing time
  expect_error("addl 1 +inf\n", 1);             // labels must be finite
  expect_error("link 0 1\n", 1);                // missing label
  expect_error("addv 4294967296\n", 1);         // vertex id out of range
  CHECK_THROWS_AS(trace::parse_time("soon"), std::invalid_argument);
  CHECK(trace::parse_time("+inf") == TimeValue::pos_inf());
  CHECK(trace::parse_time("-inf") == TimeValue::neg_inf());
  CHECK(trace::parse_time("-12") == TimeValue::finite(-12));
}

TEST_CASE("every engine answers the single-edge example") {
  std::vector<TraceOp> ops = trace::parse(
      "addv 0\naddv 1\nlink 1 0 3\nea 1 0 1\nea 1 0 4\nld 1 0 3\n"
      "reach 1 0 1 3\nreach 1 0 4 9\nea 0 0 5\n");
  std::vector<std::string> want = {"3", "+inf", "3", "true", "false", "5"};
  for (EngineKind kind : kAllEngines) {
    CHECK_MESSAGE(run_ops(kind, ops) == want, engine_name(kind));
  }
}

TEST_CASE("every engine reports cross-tree conventions") {
  std::vector<TraceOp> ops = trace::parse(
      "addv 0\naddv 1\nea 0 1 -inf\nld 0 1 +inf\nreach 0 1 -inf +inf\n");
  std::vector<std::string> want = {"+inf", "-inf", "false"};
  for (EngineKind kind : kAllEngines) {
    CHECK_MESSAGE(run_ops(kind, ops) == want, engine_name(kind));
  }
}

TEST_CASE("precondition violations surface as exceptions and change nothing") {
  auto engine = make_engine(EngineKind::kForest);
  engine->apply(OpAddVertex{0});
  CHECK_THROWS_AS(engine->apply(OpAddVertex{0}), std::invalid_argument);
  CHECK_THROWS_AS(engine->apply(OpCut{0}), std::invalid_argument);
  engine->apply(OpAddVertex{1});
  engine->apply(OpLink{1, 0, TemporalLabel::plain(2)});
  CHECK_THROWS_AS(engine->apply(OpDelLabel{1, TemporalLabel::plain(2)}),
                  std::invalid_argument);
  CHECK(engine->validate().empty());
  // Latency labels are refused by the plain engines.
  CHECK_THROWS_AS(engine->apply(OpAddLabel{1, TemporalLabel{4, 6}}),
                  std::invalid_argument);
}

TEST_CASE("generated traces are deterministic and respect their regime") {
  GenParams p;
  p.n = 10;
  p.ops = 90;
  for (auto regime : {GenParams::Regime::kMixed, GenParams::Regime::kIncremental,
                      GenParams::Regime::kDecremental}) {
    p.regime = regime;
    for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
      std::vector<TraceOp> a = generate(seed, p);
      std::vector<TraceOp> b = generate(seed, p);
      REQUIRE(a.size() == b.size());
      bool deletions_seen = false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(trace::format_op(a[i], false) == trace::format_op(b[i], false));
        bool is_del = std::holds_alternative<OpDelVertex>(a[i]) ||
                      std::holds_alternative<OpCut>(a[i]) ||
                      std::holds_alternative<OpDelLabel>(a[i]);
        bool is_add = std::holds_alternative<OpAddVertex>(a[i]) ||
                      std::holds_alternative<OpLink>(a[i]) ||
                      std::holds_alternative<OpAddLabel>(a[i]);
        if (regime == GenParams::Regime::kIncremental) CHECK_FALSE(is_del);
        if (regime == GenParams::Regime::kDecremental) {
          if (is_del) deletions_seen = true;
          if (deletions_seen) CHECK_FALSE(is_add);
        }
      }
      // Feasibility: the reference engine accepts every line.
      auto engine = make_engine(EngineKind::kOracle);
      for (const TraceOp& op : a) CHECK_NOTHROW(engine->apply(op));
    }
  }
}

TEST_CASE("difftest passes for the tree engines") {
  GenParams p;
  p.n = 14;
  p.ops = 110;
  for (EngineKind kind : {EngineKind::kForest, EngineKind::kHld}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      DiffResult r = difftest(seed, p, kind, false);
      REQUIRE_MESSAGE(r.ok, (engine_name(kind) + " seed " +
                             std::to_string(seed) + " op " +
                             std::to_string(r.op_index) + " " + r.kind + ": " +
                             r.detail));
    }
  }
}

TEST_CASE("path engine matches the oracle on a chain trace") {
  // The path engine only accepts forests that happen to be simple chains,
  // so the trace is built by hand instead of via the generator.
  std::vector<std::string> lines = {"addv 0", "addv 1", "addv 2", "addv 3",
                                    "link 1 0 2", "link 2 1 4", "link 3 2 1"};
  SplitMix64 rng(99);
  std::set<std::pair<VertexId, std::int64_t>> extra;
  for (int i = 0; i < 160; ++i) {
    double roll = rng.unit();
    if (roll < 0.35) {
      VertexId v = 1 + static_cast<VertexId>(rng.below(3));
      std::int64_t l = rng.range(-9, 9);
      auto key = std::make_pair(v, l);
      if (!extra.count(key) && l != 2 && l != 4 && l != 1) {
        extra.insert(key);
        lines.push_back("addl " + std::to_string(v) + " " + std::to_string(l));
      }
    } else if (roll < 0.45 && !extra.empty()) {
      auto it = extra.begin();
      std::advance(it, rng.below(extra.size()));
      lines.push_back("dell " + std::to_string(it->first) + " " +
                      std::to_string(it->second));
      extra.erase(it);
    } else {
      VertexId u = static_cast<VertexId>(rng.below(4));
      VertexId v = static_cast<VertexId>(rng.below(4));
      std::int64_t t = rng.range(-12, 12);
      const char* q = roll < 0.7 ? "ea" : "ld";
      lines.push_back(std::string(q) + " " + std::to_string(u) + " " +
                      std::to_string(v) + " " + std::to_string(t));
    }
  }
  std::string text;
  for (const std::string& l : lines) text += l + "\n";
  std::vector<TraceOp> ops = trace::parse(text);
  CHECK(run_ops(EngineKind::kPath, ops) == run_ops(EngineKind::kOracle, ops));
}

TEST_CASE("benchmark reports use the pinned csv layout") {
  BenchParams p;
  p.seed = 3;
  p.gen.n = 12;
  p.gen.ops = 200;
  std::string csv = bench_csv(EngineKind::kForest, p);
  std::vector<std::string> lines = split_lines(csv);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "engine,op,count,total_ns,p50_ns,p99_ns,fixparent_calls,rewires");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> fields;
    std::istringstream in(lines[i]);
    std::string piece;
    while (std::getline(in, piece, ',')) fields.push_back(piece);
    REQUIRE(fields.size() == 8);
    CHECK(fields[0] == "forest");
    long long count = std::stoll(fields[2]);
    CHECK(count > 0);
    CHECK(std::stoll(fields[4]) <= std::stoll(fields[5]));  // p50 <= p99
  }

  // The latency engine can append its insertion scaling series.
  BenchParams s;
  s.seed = 3;
  s.gen.n = 8;
  s.gen.ops = 40;
  s.gen.latency = GenParams::Latency::kRandom;
  s.gen.latency_d = 8;
  s.series = true;
  std::string series_csv = bench_csv(EngineKind::kLatency, s);
  bool saw_series = false;
  for (const std::string& line : split_lines(series_csv)) {
    if (line.find("latency,addl_m1024,") == 0) saw_series = true;
  }
  CHECK(saw_series);
}

TEST_CASE("cli run mirrors the library answers") {
  fs::path tr = write_trace("addv 0\naddv 1\nlink 1 0 3\nea 1 0 1\n");
  RunResult r = run_cli("run --engine forest --input " + tr.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "3\n");
  CHECK(r.err.empty());

  RunResult onto_file =
      run_cli("run --engine latency --input " + tr.string() + " --output " +
              (scratch_dir() / "answers").string());
  CHECK(onto_file.exit_code == 0);
  CHECK(slurp(scratch_dir() / "answers") == "3\n");
}

TEST_CASE("cli exit codes distinguish parse errors and rejections") {
  fs::path bad = write_trace("addv 0\nnonsense\n");
  RunResult r = run_cli("run --engine forest --input " + bad.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);

  fs::path rejected = write_trace("addv 0\naddv 0\nea 0 0 1\n");
  RunResult lax = run_cli("run --engine forest --input " + rejected.string());
  CHECK(lax.exit_code == 0);
  CHECK(lax.out == "1\n");
  CHECK(lax.err.find("rejected") != std::string::npos);
  RunResult strict =
      run_cli("run --engine forest --strict --input " + rejected.string());
  CHECK(strict.exit_code == 1);

  fs::path ok = write_trace("addv 0\nea 0 0 1\n");
  RunResult validated = run_cli("run --engine forest --validate-every-op --input " +
                                ok.string());
  CHECK(validated.exit_code == 0);
}

TEST_CASE("cli generation is byte deterministic") {
  std::string args = "gen --seed 9 --n 12 --ops 60 --latency random --latency-d 5";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());

  // Generated bytes replay cleanly through the cli runner.
  fs::path tr = write_trace(a.out);
  RunResult replay = run_cli("run --engine latency --strict --input " + tr.string());
  CHECK(replay.exit_code == 0);
  CHECK(replay.err.empty());
}

TEST_CASE("cli difftest and bench run end to end") {
  RunResult diff =
      run_cli("difftest --engine forest --seed 5 --count 3 --n 10 --ops 80");
  CHECK(diff.exit_code == 0);
  CHECK(diff.out.find("3 seeds ok") != std::string::npos);

  RunResult bench = run_cli("bench --engine hld --seed 2 --n 10 --ops 120");
  CHECK(bench.exit_code == 0);
  auto lines = split_lines(bench.out);
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "engine,op,count,total_ns,p50_ns,p99_ns,fixparent_calls,rewires");
}
