#include "conff/byte_mapping.hpp"

#include <algorithm>

namespace conff {

namespace {

using Range = std::pair<size_t, size_t>;

// First observation of the focused site, or nullptr when the variant no
// longer reaches it.
const DataCondition* observe(const ExecutionTrace& t) { return t.first_observation(); }

void flip_range(Bytes& b, Range r) {
  for (size_t i = 0; i < r.second; ++i) b[r.first + i] ^= 0xFF;
}

void randomize_range(Bytes& b, Range r, std::mt19937_64& rng) {
  for (size_t i = 0; i < r.second; ++i) {
    uint8_t old = b[r.first + i];
    uint8_t v;
    do {
      v = static_cast<uint8_t>(rng());
    } while (v == old);
    b[r.first + i] = v;
  }
}

std::vector<Range> split_range(Range r, size_t m) {
  std::vector<Range> out;
  size_t base = r.second / m, rem = r.second % m;
  size_t at = r.first;
  for (size_t i = 0; i < m; ++i) {
    size_t len = base + (i < rem ? 1 : 0);
    if (len == 0) continue;
    out.push_back({at, len});
    at += len;
  }
  return out;
}

}  // namespace

ProbeResult multi_byte_probe(const Bytes& input, int32_t site, size_t m, size_t leaf_len,
                             std::mt19937_64& rng, const RunFn& run) {
  ProbeResult res;
  if (m < 2) m = 2;
  if (leaf_len < 1) leaf_len = 1;

  const DataCondition* base = observe(run(input, site));
  res.execs = 1;
  if (!base) return res;
  res.baseline = *base;
  res.tracked = true;

  // Explicit worklist, depth first, so leaf order is deterministic.
  std::vector<Range> work;
  if (!input.empty()) work.push_back({0, input.size()});
  Bytes variant;

  auto probe_one = [&](Range seg, bool randomized) -> int {
    // 1 = operand moved, 0 = nothing moved, -1 = site lost.
    variant = input;
    if (randomized) randomize_range(variant, seg, rng);
    else flip_range(variant, seg);
    const DataCondition* obs = observe(run(variant, site));
    ++res.execs;
    if (!obs) return -1;
    return (!obs->same_lhs(res.baseline) || !obs->same_rhs(res.baseline)) ? 1 : 0;
  };

  while (!work.empty()) {
    Range r = work.back();
    work.pop_back();
    if (r.second <= leaf_len) {
      res.ranges.push_back(r);
      continue;
    }
    std::vector<Range> segs = split_range(r, m);
    std::vector<Range> changed, unchanged;
    for (Range seg : segs) {
      int verdict = probe_one(seg, false);
      if (verdict == 1) changed.push_back(seg);
      else if (verdict == 0) unchanged.push_back(seg);
    }
    if (!unchanged.empty()) {
      variant = input;
      for (Range seg : unchanged) randomize_range(variant, seg, rng);
      const DataCondition* obs = observe(run(variant, site));
      ++res.execs;
      if (obs && (!obs->same_lhs(res.baseline) || !obs->same_rhs(res.baseline))) {
        for (Range seg : unchanged)
          if (probe_one(seg, true) == 1) changed.push_back(seg);
      }
    }
    // Reverse so the leftmost segment is processed next (stack order).
    for (auto it = changed.rbegin(); it != changed.rend(); ++it) work.push_back(*it);
  }
  std::sort(res.ranges.begin(), res.ranges.end());
  return res;
}

ByteMap single_byte_probe(const Bytes& input, int32_t site, const ProbeResult& probe,
                          const RunFn& run) {
  ByteMap map;
  map.tracked = probe.tracked;
  if (!probe.tracked) return map;

  Bytes variant;
  for (const auto& [start, len] : probe.ranges) {
    for (size_t off = start; off < start + len; ++off) {
      variant = input;
      variant[off] ^= 0xFF;
      const DataCondition* obs = observe(run(variant, site));
      ++map.probe_execs;
      if (!obs) continue;
      if (!obs->same_lhs(probe.baseline)) map.lhs_offsets.push_back(off);
      if (!obs->same_rhs(probe.baseline)) map.rhs_offsets.push_back(off);
    }
  }
  for (auto* side : {&map.lhs_offsets, &map.rhs_offsets}) {
    std::sort(side->begin(), side->end());
    side->erase(std::unique(side->begin(), side->end()), side->end());
  }
  return map;
}

ByteMap build_byte_map(const Bytes& input, int32_t site, size_t m, size_t leaf_len,
                       std::mt19937_64& rng, const RunFn& run, DataCondition* baseline_out) {
  ProbeResult probe = multi_byte_probe(input, site, m, leaf_len, rng, run);
  ByteMap map = single_byte_probe(input, site, probe, run);
  map.probe_execs += probe.execs;
  if (baseline_out && probe.tracked) *baseline_out = probe.baseline;
  return map;
}

}  // namespace conff
