// Deterministic interpreter for target programs.
//
// One execution consumes an input byte string and produces a trace:
//   - path: every block entered, in order
//   - sites_hit: every constraint site whose terminator ran, with the taken
//     edge index (CondBranch: 0 = true, 1 = false; Switch: case position,
//     default = case count)
//   - coverage_count: distinct blocks on the path
//   - focused_observations: operand values for the single focused site,
//     one record per dynamic occurrence
//   - crash: first Crash instruction reached, if any (execution halts there)
//
// Semantics are total: out-of-bounds in[i] reads 0, bytes(off,len) keeps
// only in-bounds positions, division/modulo by zero yields 0, arithmetic
// wraps at 64 bits, comparisons and division are signed, shifts mask the
// count to 0..63 and >> is logical. Execution halts on crash, on return
// from the entry function, or when the step budget runs out.

#ifndef CONFF_EXECUTOR_HPP
#define CONFF_EXECUTOR_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conff/ir.hpp"

namespace conff {

inline constexpr uint64_t kDefaultStepBudget = 1'000'000;

struct DataCondition {
  int32_t site = -1;
  bool bytes_kind = false;
  int64_t lhs_int = 0;
  int64_t rhs_int = 0;
  Bytes lhs_bytes;            // bytes_kind only
  Bytes rhs_bytes;
  uint32_t lhs_len = 0;       // byte length when bytes_kind, else 8
  uint32_t rhs_len = 0;
  uint32_t occurrence = 0;    // 0-based ordinal of this dynamic hit
  uint8_t taken_edge = 0;

  bool same_lhs(const DataCondition& o) const {
    return bytes_kind ? lhs_bytes == o.lhs_bytes : lhs_int == o.lhs_int;
  }
  bool same_rhs(const DataCondition& o) const {
    return bytes_kind ? rhs_bytes == o.rhs_bytes : rhs_int == o.rhs_int;
  }
};

struct CrashRecord {
  std::string location;
  std::string type;

  std::string dedup_key() const { return location + "|" + type; }
};

enum class HaltReason : uint8_t { Returned, Crashed, BudgetExhausted };

struct SiteHit {
  int32_t site = -1;
  uint8_t edge = 0;
};

struct ExecutionTrace {
  std::vector<int32_t> path;      // block indices, in execution order
  std::vector<SiteHit> sites_hit;
  std::vector<DataCondition> focused_observations;
  uint32_t coverage_count = 0;
  std::optional<CrashRecord> crash;
  uint64_t exec_steps = 0;
  HaltReason halt = HaltReason::Returned;
  int64_t return_value = 0;

  // First dynamic hit of the given site, or nullptr.
  const SiteHit* first_hit(int32_t site) const {
    for (const SiteHit& h : sites_hit)
      if (h.site == site) return &h;
    return nullptr;
  }
  const DataCondition* first_observation() const {
    return focused_observations.empty() ? nullptr : &focused_observations.front();
  }
};

class Executor {
 public:
  explicit Executor(const TargetProgram& p);

  // focus < 0 disables data-flow observation. The trace argument is
  // overwritten; reusing one trace across runs avoids reallocation.
  void run(std::span<const uint8_t> input, int32_t focus, uint64_t step_budget,
           ExecutionTrace& out);

  ExecutionTrace run(std::span<const uint8_t> input, int32_t focus = -1,
                     uint64_t step_budget = kDefaultStepBudget) {
    ExecutionTrace t;
    run(input, focus, step_budget, t);
    return t;
  }

  const TargetProgram& program() const { return *p_; }

 private:
  int64_t eval(const Function& f, int32_t e, std::span<const uint8_t> input,
               const int64_t* regs) const;
  Bytes eval_bytes(const Function& f, int32_t e, std::span<const uint8_t> input,
                   const int64_t* regs) const;

  const TargetProgram* p_;
  std::vector<uint32_t> visit_epoch_;
  uint32_t epoch_ = 0;
  std::vector<int64_t> reg_stack_;
};

// Convenience one-shot wrapper.
ExecutionTrace execute(const TargetProgram& p, std::span<const uint8_t> input,
                       int32_t focus = -1, uint64_t step_budget = kDefaultStepBudget);

// Instrumented execution hook. Campaign code routes every auxiliary
// execution (length detection, probing, mutation trials) through one of
// these so exec counting, crash capture, and logging stay in one place.
// The returned reference stays valid until the next call.
using RunFn = std::function<const ExecutionTrace&(const Bytes& input, int32_t focus)>;

// Fraction of program blocks on the trace's path: coverage_count / total,
// in (0, 1] for any completed execution.
double coverage_of(const TargetProgram& p, const ExecutionTrace& t);

}  // namespace conff

#endif
