// Seed scheduling and constraint selection.
//
// Seeds are ordered by a policy built from two measurements of the seed's
// own execution:
//   D  - smallest static distance of any branch site the seed reached
//   C  - fraction of the program's branch sites the seed reached
//
// Policies:
//   fifo   arrival order only
//   d      ascending D
//   dc     ascending D, then ascending C
//   dinvc  ascending D, then descending C (default)
// Under every policy except fifo, seeds with unreachable D sort last; ties
// fall back to arrival order. The queue also exposes the scalar
//   P = (D * 10^8 + floor((1/C) * 10^8)) mod 10^16
// which folds both measurements into one number for reports; ordering is
// done on the components directly so no precision is lost.
#ifndef CONFF_SCHEDULING_HPP
#define CONFF_SCHEDULING_HPP

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "conff/executor.hpp"
#include "conff/ir.hpp"
#include "conff/static_analysis.hpp"

namespace conff {

enum class SeedPolicy {
  Fifo,
  Distance,
  DistanceCoverage,
  DistanceInvCoverage,
};

// Accepts "fifo", "d", "dc", "dinvc"; throws std::invalid_argument otherwise.
SeedPolicy seed_policy_from_name(const std::string& name);
const char* seed_policy_name(SeedPolicy policy);

struct SeedEntry {
  Bytes input;
  uint32_t distance = kUnreachable;
  uint64_t hits = 0;   // distinct branch sites reached
  uint64_t total = 1;  // branch sites in the program
  uint64_t arrival = 0;
};

// Reporting scalar described above, computed in exact integer arithmetic.
// Returns UINT64_MAX when undefined (no site reached or unreachable D).
uint64_t seed_priority(uint32_t distance, uint64_t hits, uint64_t total);

class SeedQueue {
 public:
  explicit SeedQueue(SeedPolicy policy) : policy_(policy), entries_(Cmp{policy}) {}

  SeedPolicy policy() const { return policy_; }

  // True when a schedules strictly ahead of b under this queue's policy.
  bool before(const SeedEntry& a, const SeedEntry& b) const;

  // Arrival stamps must be unique and increasing; take them from here.
  uint64_t next_arrival() { return arrival_++; }

  // Unconditional insert: initial seeds, requeues, and mutants that
  // uncovered a new (site, edge) pair.
  void push(SeedEntry e);

  // Gated insert: the candidate enters only when the queue is empty or it
  // schedules ahead of the seed currently being fuzzed. Byte strings that
  // were enqueued before are rejected.
  bool offer(SeedEntry e, const SeedEntry* current);

  // True when these exact bytes entered the queue at some point.
  bool known(const Bytes& b) const { return seen_.count(b) != 0; }

  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  SeedEntry pop_best();
  void clear() { entries_.clear(); }

 private:
  struct Cmp {
    SeedPolicy policy;
    bool operator()(const SeedEntry& a, const SeedEntry& b) const;
  };

  SeedPolicy policy_;
  uint64_t arrival_ = 0;
  std::multiset<SeedEntry, Cmp> entries_;
  std::set<Bytes> seen_;
};

// One branch site picked for focused mutation: the site, the edge the seed
// took there, and the best static distance the site is published at.
struct ConstraintCandidate {
  int32_t site = -1;
  uint8_t taken_edge = 0;
  uint32_t distance = kUnreachable;
};

// (site, taken edge) pairs that already went through a focused round.
using AttemptedSet = std::set<std::pair<int32_t, uint8_t>>;

struct SeedStats {
  uint32_t distance = kUnreachable;
  uint64_t hits = 0;
  uint64_t total = 1;
};

// D and C of one execution, measured against the published site distances.
SeedStats seed_stats(const TargetProgram& p, const std::vector<SiteInfo>& infos,
                     const ExecutionTrace& trace);

// Picks the `keep` nearest constraints out of a trace. A hit site survives
// only if some published distance for it is finite and it is not a loop
// condition, the (site, taken edge) pair was not attempted before, and some
// other edge at the site leads strictly closer to the target than the edge
// the seed took. Result is sorted by (distance, site id).
std::vector<ConstraintCandidate> filter_constraints(const TargetProgram& p, const DistanceMap& dm,
                                                    const std::vector<SiteInfo>& infos,
                                                    const ExecutionTrace& trace,
                                                    const AttemptedSet& attempted, size_t keep = 3);

}  // namespace conff

#endif
