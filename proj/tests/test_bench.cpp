#include <algorithm>
#include <set>

#include "conff/bench.hpp"
#include "conff/parser.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"

using namespace conff;

TEST_CASE("kind names round trip") {
  for (const char* n : {"magic", "checksum", "switch", "length", "mixed"})
    CHECK(bench_kind_name(bench_kind_from_name(n)) == std::string(n));
  CHECK_THROWS_AS(bench_kind_from_name("maze"), std::invalid_argument);
}

TEST_CASE("every generated program crashes on its solving input and not on its seed") {
  for (BenchKind k : {BenchKind::MagicChain, BenchKind::ChecksumGate, BenchKind::SwitchMaze,
                      BenchKind::LengthGate, BenchKind::Mixed}) {
    for (size_t depth : {size_t{1}, size_t{3}}) {
      BenchProgram b = generate_bench(k, depth, 11);
      CAPTURE(b.name);
      CHECK(b.depth == depth);
      CHECK(b.kind == k);
      CHECK(b.name.find(bench_kind_name(k)) == 0);
      CHECK(b.target_location == b.name + ".c:1");

      ExecutionTrace win = execute(b.program, b.solving_input);
      REQUIRE(win.crash.has_value());
      CHECK(win.crash->location == b.target_location);

      ExecutionTrace seed = execute(b.program, b.recommended_seed);
      CHECK(!seed.crash.has_value());

      CHECK(b.solving_input.size() >= b.min_len);
      CHECK(validate(b.program).empty());
    }
  }
}

TEST_CASE("generation is deterministic and variants differ") {
  BenchProgram a = generate_bench(BenchKind::MagicChain, 4, 2);
  BenchProgram b = generate_bench(BenchKind::MagicChain, 4, 2);
  CHECK(serialize_program(a.program) == serialize_program(b.program));
  CHECK(a.solving_input == b.solving_input);
  CHECK(a.recommended_seed == b.recommended_seed);

  BenchProgram c = generate_bench(BenchKind::MagicChain, 4, 3);
  CHECK(serialize_program(a.program) != serialize_program(c.program));
  CHECK(a.name != c.name);
}

TEST_CASE("ground truth lists one entry per gate, two for decoyed chains") {
  BenchProgram magic = generate_bench(BenchKind::MagicChain, 3, 0);
  CHECK(magic.gates.size() == 3);
  for (const GateTruth& g : magic.gates) {
    CHECK(g.kind == "magic");
    CHECK(g.site >= 0);
    CHECK(g.offsets.size() == 4);
    CHECK(g.value.size() == 4);
  }

  BenchProgram mixed = generate_bench(BenchKind::Mixed, 3, 0);
  size_t decoys = 0;
  for (const GateTruth& g : mixed.gates) decoys += g.kind == "decoy";
  CHECK(decoys == 3);
  CHECK(mixed.gates.size() == 6);

  nlohmann::json j = nlohmann::json::parse(bench_ground_truth_json(mixed));
  CHECK(j["name"] == mixed.name);
  CHECK(j["kind"] == "mixed");
  CHECK(j["target_location"] == mixed.target_location);
  CHECK(j["gates"].size() == mixed.gates.size());
  CHECK(j["gates"][0].contains("site"));
  CHECK(j["gates"][0].contains("offsets"));
}

TEST_CASE("wiring cases expose exact operand offsets") {
  std::set<size_t> sizes;
  for (uint64_t v = 0; v < 10; ++v) {
    WiringCase w = generate_wiring_case(v);
    CAPTURE(v);
    CHECK(!w.expected.empty());
    CHECK(!w.input.empty());
    for (size_t off : w.expected) CHECK(off < w.input.size());
    CHECK(w.site >= 0);
    sizes.insert(w.expected.size());
    // deterministic
    WiringCase again = generate_wiring_case(v);
    CHECK(again.input == w.input);
    CHECK(again.expected == w.expected);
  }
  CHECK(sizes.size() > 1);  // several condition shapes
}

TEST_CASE("baseline fuzzers crack a one-byte gate and respect their budget") {
  TargetProgram p = parse_program(
      "fn main() {\n"
      "  block b: br site=s (in[0] == 7) -> y, n\n"
      "  block y: crash \"easy.c:1\" \"boom\"\n ret 1\n"
      "  block n: ret 0\n"
      "}\n");
  BaselineConfig cfg;
  cfg.target_location = "easy.c:1";
  cfg.seeds = {Bytes(1, 0)};
  cfg.max_len = 4;
  cfg.max_execs = 100000;

  BaselineResult rnd = run_random_fuzzer(p, cfg);
  CHECK(rnd.target_crash_found);
  CHECK(rnd.execs_to_target_crash >= 1);
  CHECK(rnd.unique_crashes == 1);
  BaselineResult again = run_random_fuzzer(p, cfg);
  CHECK(again.execs_to_target_crash == rnd.execs_to_target_crash);

  BaselineResult cov = run_coverage_fuzzer(p, cfg);
  CHECK(cov.target_crash_found);

  // A four-gate magic chain is hopeless for undirected search.
  BenchProgram hard = generate_bench(BenchKind::MagicChain, 4, 0);
  BaselineConfig hcfg;
  hcfg.target_location = hard.target_location;
  hcfg.seeds = {hard.recommended_seed};
  hcfg.max_len = hard.solving_input.size();
  hcfg.max_execs = 20000;
  BaselineResult lost = run_random_fuzzer(hard.program, hcfg);
  CHECK(!lost.target_crash_found);
  CHECK(lost.execs == 20000);
}

TEST_CASE("side-by-side comparison emits one row per program and fuzzer") {
  std::vector<BenchProgram> suite;
  suite.push_back(generate_bench(BenchKind::MagicChain, 1, 0));
  suite.push_back(generate_bench(BenchKind::LengthGate, 1, 0));
  std::vector<CompareRow> rows = run_comparison(suite, 20000, 1);
  REQUIRE(rows.size() == 6);
  for (size_t i = 0; i < rows.size(); i += 3) {
    CHECK(rows[i].fuzzer == "conff");
    CHECK(rows[i + 1].fuzzer == "random");
    CHECK(rows[i + 2].fuzzer == "coverage");
    CHECK(rows[i].program == suite[i / 3].name);
    CHECK(rows[i].found);  // the directed campaign solves both shapes
  }

  std::string csv = compare_csv(rows);
  CHECK(csv.rfind("program,fuzzer,execs_to_crash,walltime_ms,found\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
