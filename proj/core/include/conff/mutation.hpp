// Mutation strategies for a focused constraint.
//
// After probing, a condition falls into one of three classes:
//   FixedToFixed   neither operand depends on the input; nothing to do here
//   FixedToMapped  one operand is input bytes, the other a constant; copy
//                  the constant into the mapped bytes (several encodings)
//   MappedToMapped both operands move with the input; for integers, walk
//                  the mutable side toward the other by signed powers of
//                  two, keeping a step only when |lhs - rhs| shrinks
//
// The fallbacks run when focused mutation fails: per-byte edits at offsets
// no probe attributed to anything, and bounded random havoc.

#ifndef CONFF_MUTATION_HPP
#define CONFF_MUTATION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "conff/byte_mapping.hpp"
#include "conff/executor.hpp"
#include "conff/ir.hpp"
#include "conff/static_analysis.hpp"

namespace conff {

enum class ConditionClass { FixedToFixed, FixedToMapped, MappedToMapped };

ConditionClass classify(const ByteMap& map);

// For a switch constraint: the case value whose edge leads strictly closer
// to the target than the taken edge, ties broken toward the lowest case
// index. Empty when only the default edge would improve (no single value
// reaches "none of the cases").
std::optional<int64_t> switch_desired_value(const TargetProgram& p, const DistanceMap& dm,
                                            int32_t site, uint8_t taken_edge);

// Variants that copy the fixed operand into the mapped side's offsets.
// Byte comparisons copy verbatim (both directions when both sides are
// mapped); integer comparisons try little endian, big endian, decimal
// ASCII, and hex ASCII encodings, deduplicated in that order.
// `desired` overrides the constant to write (switch case values).
std::vector<Bytes> solve_magic(const Bytes& input, const ByteMap& map,
                               const DataCondition& baseline,
                               std::optional<int64_t> desired = std::nullopt);

struct ChecksumOutcome {
  Bytes input;
  bool solved = false;  // |lhs - rhs| reached 0
  uint64_t execs = 0;
};

// Signed power-of-two descent on the mutable side (the side with more
// mapped offsets, ties to lhs). At most `budget` executions.
ChecksumOutcome solve_checksum(const Bytes& input, const ByteMap& map, int32_t site,
                               uint64_t budget, const RunFn& run);

// Calls try_one with five variants (XOR 0xFF, +1, -1, 0x00, 0xFF) per
// offset not marked covered, in offset order, until it returns true.
void for_each_missed(const Bytes& input, const std::vector<bool>& covered,
                     const std::function<bool(const Bytes&)>& try_one);

// 1..32 single-byte overwrites, each forced to differ from the original.
Bytes random_mutate(const Bytes& input, std::mt19937_64& rng);

}  // namespace conff

#endif
