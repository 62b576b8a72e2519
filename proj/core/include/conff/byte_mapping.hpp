// Byte mapping: which input bytes feed a branch condition's operands.
//
// Stage one (multi_byte_probe) bisects the input. The current range is cut
// into m segments and each segment is flipped (XOR 0xFF) in isolation:
//   - the focused site disappears from the trace -> the segment derails
//     execution and is discarded
//   - an operand value changes -> the segment feeds the condition; recurse
//     until segments are at most leaf_len bytes
//   - nothing changes -> possibly a coincidence of the flip, so all such
//     segments get one combined pass with fresh random bytes; only if that
//     pass moves an operand are they re-probed one by one
//
// Stage two (single_byte_probe) flips single bytes inside the surviving
// leaf ranges and attributes each byte to the operand side it moves.
//
// Execution counts include the baseline run of the unmodified input.

#ifndef CONFF_BYTE_MAPPING_HPP
#define CONFF_BYTE_MAPPING_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "conff/executor.hpp"
#include "conff/ir.hpp"

namespace conff {

struct ProbeResult {
  std::vector<std::pair<size_t, size_t>> ranges;  // surviving (start, len) leaves
  DataCondition baseline;                         // observation on the unmodified input
  bool tracked = false;                           // site observed at all
  uint64_t execs = 0;
};

struct ByteMap {
  std::vector<size_t> lhs_offsets;  // sorted, distinct
  std::vector<size_t> rhs_offsets;
  bool tracked = false;
  uint64_t probe_execs = 0;
};

ProbeResult multi_byte_probe(const Bytes& input, int32_t site, size_t m, size_t leaf_len,
                             std::mt19937_64& rng, const RunFn& run);

ByteMap single_byte_probe(const Bytes& input, int32_t site, const ProbeResult& probe,
                          const RunFn& run);

// Both stages back to back; probe_execs is their combined cost.
ByteMap build_byte_map(const Bytes& input, int32_t site, size_t m, size_t leaf_len,
                       std::mt19937_64& rng, const RunFn& run, DataCondition* baseline_out = nullptr);

}  // namespace conff

#endif
