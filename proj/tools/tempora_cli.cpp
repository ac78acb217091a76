#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "tempora/trace.hpp"
#include "tempora/workload.hpp"

namespace {

using namespace tempora;

struct OutputFile {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  // Returns false when the path cannot be opened.
  bool open(const std::string& path) {
    if (path == "-") return true;
    file.open(path);
    if (!file) return false;
    stream = &file;
    return true;
  }
};

int do_run(const std::string& engine_s, const std::string& input,
           const std::string& output, bool strict, bool validate_every) {
  auto kind = engine_from_name(engine_s);
  if (!kind) {
    std::cerr << "unknown engine '" << engine_s << "'\n";
    return 2;
  }
  std::vector<trace::ParsedOp> ops;
  try {
    if (input == "-") {
      ops = trace::parse_lines(std::cin);
    } else {
      std::ifstream in(input);
      if (!in) {
        std::cerr << "cannot open '" << input << "'\n";
        return 2;
      }
      ops = trace::parse_lines(in);
    }
  } catch (const trace::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  OutputFile out;
  if (!out.open(output)) {
    std::cerr << "cannot open '" << output << "'\n";
    return 2;
  }
  std::unique_ptr<Engine> eng = make_engine(*kind);
  for (const trace::ParsedOp& po : ops) {
    try {
      if (auto ans = eng->apply(po.op)) *out.stream << *ans << "\n";
    } catch (const std::exception& e) {
      std::cerr << "line " << po.line << ": rejected: " << e.what() << "\n";
      if (strict) return 1;
      continue;
    }
    if (validate_every && !is_query(po.op)) {
      std::vector<std::string> probs = eng->validate();
      if (!probs.empty()) {
        for (const std::string& m : probs) {
          std::cerr << "line " << po.line << ": invalid state: " << m << "\n";
        }
        return 1;
      }
    }
  }
  return 0;
}

int do_gen(std::uint64_t seed, const GenParams& params,
           const std::string& output) {
  OutputFile out;
  if (!out.open(output)) {
    std::cerr << "cannot open '" << output << "'\n";
    return 2;
  }
  std::vector<TraceOp> ops;
  try {
    ops = generate(seed, params);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  bool with_latency = params.latency != GenParams::Latency::kNone;
  for (const TraceOp& op : ops) {
    *out.stream << trace::format_op(op, with_latency) << "\n";
  }
  return 0;
}

int do_difftest(const std::string& engine_s, std::uint64_t seed,
                std::uint64_t count, const GenParams& params,
                bool validate_every) {
  auto kind = engine_from_name(engine_s);
  if (!kind) {
    std::cerr << "unknown engine '" << engine_s << "'\n";
    return 2;
  }
  for (std::uint64_t s = seed; s < seed + count; ++s) {
    DiffResult r = difftest(s, params, *kind, validate_every);
    if (!r.ok) {
      std::cout << "seed " << s << " op " << r.op_index << " " << r.kind
                << ": " << r.detail << "\n";
      return 1;
    }
    std::cout << "seed " << s << ": ok\n";
  }
  std::cout << count << " seed" << (count == 1 ? "" : "s") << " ok\n";
  return 0;
}

int do_bench(const std::string& engine_s, const BenchParams& params,
             const std::string& output) {
  auto kind = engine_from_name(engine_s);
  if (!kind) {
    std::cerr << "unknown engine '" << engine_s << "'\n";
    return 2;
  }
  OutputFile out;
  if (!out.open(output)) {
    std::cerr << "cannot open '" << output << "'\n";
    return 2;
  }
  *out.stream << bench_csv(*kind, params);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic temporal forest toolkit"};
  app.require_subcommand(1);

  std::string engine = "forest";
  std::string input = "-";
  std::string output = "-";
  bool strict = false;
  bool validate_every = false;
  std::uint64_t seed = 1;
  std::uint64_t count = 1;
  bool series = false;
  GenParams gp;
  std::string latency = "none";
  std::string regime = "mixed";

  auto add_gen_options = [&](CLI::App* cmd) {
    cmd->add_option("--n", gp.n, "vertex budget")->capture_default_str();
    cmd->add_option("--ops", gp.ops, "ops per trace")->capture_default_str();
    cmd->add_option("--label-min", gp.label_min, "smallest label")
        ->capture_default_str();
    cmd->add_option("--label-max", gp.label_max, "largest label")
        ->capture_default_str();
    cmd->add_option("--latency", latency, "none|uniform|random")
        ->check(CLI::IsMember({"none", "uniform", "random"}))
        ->capture_default_str();
    cmd->add_option("--latency-d", gp.latency_d,
                    "uniform delay, or largest random delay")
        ->capture_default_str();
    cmd->add_option("--regime", regime, "mixed|incremental|decremental")
        ->check(CLI::IsMember({"mixed", "incremental", "decremental"}))
        ->capture_default_str();
    cmd->add_option("--query-share", gp.query_share, "query probability")
        ->capture_default_str();
  };

  CLI::App* run = app.add_subcommand("run", "execute a trace on one engine");
  run->add_option("--engine", engine, "forest|latency|hld|path|oracle")
      ->capture_default_str();
  run->add_option("--input", input, "trace file, - for stdin")
      ->capture_default_str();
  run->add_option("--output", output, "output file, - for stdout")
      ->capture_default_str();
  run->add_flag("--strict", strict, "abort on the first rejected line");
  run->add_flag("--validate-every-op", validate_every,
                "structural self-check after every update");

  CLI::App* gen = app.add_subcommand("gen", "emit a reproducible trace");
  gen->add_option("--seed", seed, "workload seed")->capture_default_str();
  add_gen_options(gen);
  gen->add_option("--output", output, "output file, - for stdout")
      ->capture_default_str();

  CLI::App* diff =
      app.add_subcommand("difftest", "run an engine and the oracle in lockstep");
  diff->add_option("--engine", engine, "engine to compare against the oracle")
      ->capture_default_str();
  diff->add_option("--seed", seed, "first seed")->capture_default_str();
  diff->add_option("--count", count, "number of consecutive seeds")
      ->capture_default_str();
  add_gen_options(diff);
  diff->add_flag("--validate-every-op", validate_every,
                 "structural self-check after every update");

  CLI::App* bench = app.add_subcommand("bench", "time ops and emit CSV");
  bench->add_option("--engine", engine, "engine to measure")
      ->capture_default_str();
  bench->add_option("--seed", seed, "workload seed")->capture_default_str();
  add_gen_options(bench);
  bench->add_flag("--series", series,
                  "append label-insertion scaling rows (latency engine)");
  bench->add_option("--output", output, "output file, - for stdout")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (latency == "uniform") {
    gp.latency = GenParams::Latency::kUniform;
  } else if (latency == "random") {
    gp.latency = GenParams::Latency::kRandom;
  }
  if (regime == "incremental") {
    gp.regime = GenParams::Regime::kIncremental;
  } else if (regime == "decremental") {
    gp.regime = GenParams::Regime::kDecremental;
  }

  if (run->parsed()) {
    return do_run(engine, input, output, strict, validate_every);
  }
  if (gen->parsed()) return do_gen(seed, gp, output);
  if (diff->parsed()) {
    return do_difftest(engine, seed, count, gp, validate_every);
  }
  BenchParams bp;
  bp.seed = seed;
  bp.gen = gp;
  bp.series = series;
  return do_bench(engine, bp, output);
}
