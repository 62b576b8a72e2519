// Input length adjustment.
//
// Many targets gate deeper logic on input length (header loops, record
// counts), so before a seed is fuzzed its length is adjusted in two moves:
//
//   growth: double the input by appending bytes copied from random
//   positions of the current content; keep the doubled input when it hits
//   strictly more dynamic branch-site occurrences or strictly more distinct
//   sites, and repeat until a doubling stops paying off or max_len is hit.
//
//   shrink: cut the tail half; keep the cut when both the occurrence count
//   and the distinct-site set stay exactly the same, and repeat.
//
// An empty seed has no content to copy, so its first growth step appends a
// single zero byte. Every candidate evaluation costs one execution through
// the supplied hook.

#ifndef CONFF_LENGTH_DETECTION_HPP
#define CONFF_LENGTH_DETECTION_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "conff/executor.hpp"
#include "conff/ir.hpp"

namespace conff {

struct LengthSignal {
  size_t occurrences = 0;       // dynamic branch-site hits
  std::vector<int32_t> sites;   // distinct site ids, sorted

  friend bool operator==(const LengthSignal&, const LengthSignal&) = default;
};

LengthSignal length_signal(const ExecutionTrace& t);

Bytes detect_length(const Bytes& seed, size_t max_len, std::mt19937_64& rng, const RunFn& run);

}  // namespace conff

#endif
