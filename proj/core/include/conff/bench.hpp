// Synthetic crash benchmarks and baseline fuzzers.
//
// Each generated program plants one crash behind a chain of gates and ships
// with full ground truth: the site guarding every gate, the input bytes
// wired into it, a value that passes it, a seed the campaign is expected to
// start from, and one input that provably reaches the crash (the generator
// executes it and refuses to return a program it cannot crash).
//
// Gate chains come in five shapes:
//   magic     4-byte constant compares on disjoint windows
//   checksum  byte-sum over a window must equal a 16-bit little endian
//             field next to it
//   switch    one scrutinee byte per gate; the winning case descends, a
//             decoy case adds coverage noise, default rejects
//   length    nothing but doubling length guards (8, 16, 32, ...)
//   mixed     magic/switch/checksum gates interleaved, each with a decoy
//             branch that multiplies seed-queue traffic
//
// The baseline fuzzers share the interpreter and crash accounting but use
// no direction: one havocs round-robin over the initial seeds and keeps
// nothing, the other grows a corpus on new block coverage.

#ifndef CONFF_BENCH_HPP
#define CONFF_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "conff/campaign.hpp"
#include "conff/executor.hpp"
#include "conff/ir.hpp"

namespace conff {

enum class BenchKind { MagicChain, ChecksumGate, SwitchMaze, LengthGate, Mixed };

// Accepts "magic", "checksum", "switch", "length", "mixed"; throws
// std::invalid_argument otherwise.
BenchKind bench_kind_from_name(const std::string& name);
const char* bench_kind_name(BenchKind kind);

struct GateTruth {
  std::string kind;             // "magic", "checksum", "switch", "length", "decoy"
  int32_t site = -1;
  std::vector<size_t> offsets;  // input bytes wired into the condition
  Bytes value;                  // window content that passes the gate
  size_t required_len = 0;      // length gates only
};

struct BenchProgram {
  TargetProgram program;
  std::string name;
  BenchKind kind = BenchKind::MagicChain;
  size_t depth = 1;
  std::string target_location;
  Bytes recommended_seed;
  Bytes solving_input;
  size_t min_len = 0;
  std::vector<GateTruth> gates;
};

// Deterministic in (kind, depth, variant). depth >= 1; length chains cap at
// depth 10 (final gate 4096 bytes). Throws std::invalid_argument on a bad
// shape and std::logic_error if the self-check input fails to crash.
BenchProgram generate_bench(BenchKind kind, size_t depth, uint64_t variant);

// Ground truth as a JSON document (hex-encoded byte strings).
std::string bench_ground_truth_json(const BenchProgram& b);

// Single-condition program with known byte wiring, for probing tests. The
// condition form and operand offsets vary with `variant`.
struct WiringCase {
  TargetProgram program;
  int32_t site = 0;
  Bytes input;
  std::vector<size_t> expected;  // offsets that truly feed the condition
};

WiringCase generate_wiring_case(uint64_t variant);

struct BaselineConfig {
  std::string target_location;
  std::vector<Bytes> seeds;  // empty -> one empty seed
  uint64_t max_execs = 1'000'000;
  uint64_t step_budget = kDefaultStepBudget;
  size_t max_len = 4096;
  uint64_t rng_seed = 1;
  bool stop_on_target_crash = true;
};

struct BaselineResult {
  uint64_t execs = 0;
  bool target_crash_found = false;
  uint64_t execs_to_target_crash = 0;
  uint64_t unique_crashes = 0;
  double wall_ms = 0;
};

BaselineResult run_random_fuzzer(const TargetProgram& p, const BaselineConfig& cfg);
BaselineResult run_coverage_fuzzer(const TargetProgram& p, const BaselineConfig& cfg);

struct CompareRow {
  std::string program;
  std::string fuzzer;  // "conff", "random", "coverage"
  bool found = false;
  uint64_t execs_to_crash = 0;  // execs at first target crash, total execs otherwise
  double wall_ms = 0;
};

// Runs the directed campaign plus both baselines on every program, starting
// from each program's recommended seed, stopping at the target crash or at
// max_execs. max_len adapts to each program's solving input.
std::vector<CompareRow> run_comparison(const std::vector<BenchProgram>& programs,
                                       uint64_t max_execs, uint64_t rng_seed,
                                       SeedPolicy policy = SeedPolicy::DistanceInvCoverage);

// CSV: program,fuzzer,execs_to_crash,walltime_ms,found
std::string compare_csv(const std::vector<CompareRow>& rows);

}  // namespace conff

#endif
