// Directed fuzzing campaign driver.
//
// A campaign steers execution toward one crash location. The outer loop
// pops the best seed under the configured policy, adjusts its length, and
// picks the nearest few unsatisfied constraints from its trace. The inner
// loop probes each constraint's byte wiring and mutates by condition class
// (constant copy, checksum descent, random values on mapped bytes). A
// constraint counts as satisfied when the mutated input takes a different
// edge at the site and that edge's successor block is strictly closer to
// the target; the satisfying input then re-enters the seed queue and the
// remaining constraints of this round are dropped. When a whole round ends
// unsatisfied, per-byte edits run at offsets no probe attributed to
// anything, and random havoc bursts kick in once the best distance has
// stagnated. Every execution is counted, offered to the seed queue, and
// checked for crashes; unique crashes are kept with their inputs.

#ifndef CONFF_CAMPAIGN_HPP
#define CONFF_CAMPAIGN_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "conff/executor.hpp"
#include "conff/ir.hpp"
#include "conff/scheduling.hpp"
#include "conff/static_analysis.hpp"

namespace conff {

inline constexpr size_t kMaxInputCap = 4u << 20;  // hard ceiling on max_len

struct CampaignConfig {
  std::string target_location;
  std::vector<Bytes> seeds;  // empty -> one empty seed

  uint64_t max_execs = 1'000'000;
  uint64_t step_budget = kDefaultStepBudget;
  size_t max_len = 4096;
  size_t probe_m = 4;
  size_t probe_leaf = 4;
  size_t constraints_per_seed = 3;
  uint64_t checksum_budget = 256;
  uint64_t mapped_random_budget = 100;  // random values on mapped bytes, per constraint
  uint64_t stagnation_limit = 500;      // execs without a best-distance drop
  uint64_t random_burst = 64;           // havoc execs per stagnated round
  SeedPolicy policy = SeedPolicy::DistanceInvCoverage;
  uint64_t rng_seed = 1;
  bool stop_on_target_crash = false;
  bool log_events = true;
};

struct EventRow {
  uint64_t exec = 0;
  std::string phase;
  int32_t site = -1;
  uint32_t d_best = kUnreachable;
  uint64_t c_best_hits = 0;  // c_best = hits / total
  std::string event;
};

struct CampaignReport {
  std::string target_location;
  uint64_t execs = 0;
  uint64_t seeds_processed = 0;
  uint64_t satisfied_constraints = 0;
  uint32_t best_distance = kUnreachable;
  uint64_t best_hits = 0;
  uint64_t total_sites = 1;

  std::vector<CrashRecord> crashes;  // unique by (location, type)
  std::vector<Bytes> crash_inputs;   // first input per unique crash
  bool target_crash_found = false;
  uint64_t execs_to_target_crash = 0;

  double wall_ms = 0;  // measured, never serialized
  std::vector<EventRow> events;
};

// True when `after` flips the site to an edge whose successor block lies
// strictly closer to the target than the old edge's successor.
bool judge_satisfaction(const TargetProgram& p, const DistanceMap& dm, int32_t site,
                        uint8_t old_edge, const ExecutionTrace& after);

// Throws SetupError when the target location matches nothing or the config
// is out of range.
CampaignReport run_campaign(const TargetProgram& p, const CampaignConfig& cfg);

// Deterministic text report: no wall-clock content.
std::string serialize_report(const CampaignReport& r);

// Event rows as CSV: exec#,phase,site_id,D_best,C_best,event
void write_event_csv(std::ostream& os, const CampaignReport& r);

}  // namespace conff

#endif
