#include "conff/mutation.hpp"

#include <algorithm>
#include <charconv>
#include <string>

namespace conff {

ConditionClass classify(const ByteMap& map) {
  bool l = !map.lhs_offsets.empty();
  bool r = !map.rhs_offsets.empty();
  if (l && r) return ConditionClass::MappedToMapped;
  if (l || r) return ConditionClass::FixedToMapped;
  return ConditionClass::FixedToFixed;
}

std::optional<int64_t> switch_desired_value(const TargetProgram& p, const DistanceMap& dm,
                                            int32_t site, uint8_t taken_edge) {
  const Site& s = p.sites[static_cast<size_t>(site)];
  const Terminator& t = p.blocks[static_cast<size_t>(s.block)].term;
  if (t.kind != TermKind::Switch) return std::nullopt;

  uint32_t best_d = edge_successor_distance(p, dm, site, taken_edge);
  std::optional<int64_t> best;
  for (size_t i = 0; i < t.cases.size(); ++i) {
    if (i == taken_edge) continue;
    uint32_t d = dm.of(t.cases[i].target);
    if (d < best_d) {
      best_d = d;
      best = t.cases[i].value;
    }
  }
  return best;
}

namespace {

void write_le(Bytes& b, const std::vector<size_t>& offs, uint64_t v) {
  size_t w = std::min<size_t>(offs.size(), 8);
  for (size_t i = 0; i < w; ++i) b[offs[i]] = static_cast<uint8_t>(v >> (8 * i));
}

void write_be(Bytes& b, const std::vector<size_t>& offs, uint64_t v) {
  size_t w = std::min<size_t>(offs.size(), 8);
  for (size_t i = 0; i < w; ++i) b[offs[i]] = static_cast<uint8_t>(v >> (8 * (w - 1 - i)));
}

// Text shorter than the offset list leaves trailing bytes untouched.
bool write_ascii(Bytes& b, const std::vector<size_t>& offs, const std::string& s) {
  if (s.size() > offs.size()) return false;
  for (size_t i = 0; i < s.size(); ++i) b[offs[i]] = static_cast<uint8_t>(s[i]);
  return true;
}

std::string hex_of(uint64_t v) {
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
  return std::string(buf, end);
}

}  // namespace

std::vector<Bytes> solve_magic(const Bytes& input, const ByteMap& map,
                               const DataCondition& baseline, std::optional<int64_t> desired) {
  std::vector<Bytes> out;
  auto add = [&](Bytes b) {
    if (b != input && std::find(out.begin(), out.end(), b) == out.end()) out.push_back(std::move(b));
  };

  bool l = !map.lhs_offsets.empty();
  bool r = !map.rhs_offsets.empty();
  if (!l && !r) return out;

  if (baseline.bytes_kind) {
    auto copy_into = [&](const std::vector<size_t>& offs, const Bytes& src) {
      Bytes b = input;
      for (size_t i = 0; i < offs.size() && i < src.size(); ++i) b[offs[i]] = src[i];
      add(std::move(b));
    };
    if (l) copy_into(map.lhs_offsets, baseline.rhs_bytes);
    if (r) copy_into(map.rhs_offsets, baseline.lhs_bytes);
    return out;
  }

  auto encode_into = [&](const std::vector<size_t>& offs, int64_t value) {
    uint64_t u = static_cast<uint64_t>(value);
    Bytes b = input;
    write_le(b, offs, u);
    add(std::move(b));
    b = input;
    write_be(b, offs, u);
    add(std::move(b));
    b = input;
    if (write_ascii(b, offs, std::to_string(value))) add(std::move(b));
    b = input;
    if (write_ascii(b, offs, hex_of(u))) add(std::move(b));
  };

  if (l) encode_into(map.lhs_offsets, desired.value_or(baseline.rhs_int));
  if (r) encode_into(map.rhs_offsets, desired.value_or(baseline.lhs_int));
  return out;
}

namespace {

uint64_t pack(const Bytes& in, const std::vector<size_t>& offs, size_t k) {
  uint64_t v = 0;
  for (size_t i = 0; i < k; ++i) v |= static_cast<uint64_t>(in[offs[i]]) << (8 * i);
  return v;
}

void unpack(Bytes& in, const std::vector<size_t>& offs, size_t k, uint64_t v) {
  for (size_t i = 0; i < k; ++i) in[offs[i]] = static_cast<uint8_t>(v >> (8 * i));
}

uint64_t operand_gap(const DataCondition& c) {
  int64_t a = c.lhs_int, b = c.rhs_int;
  return a > b ? static_cast<uint64_t>(a) - static_cast<uint64_t>(b)
               : static_cast<uint64_t>(b) - static_cast<uint64_t>(a);
}

}  // namespace

ChecksumOutcome solve_checksum(const Bytes& input, const ByteMap& map, int32_t site,
                               uint64_t budget, const RunFn& run) {
  ChecksumOutcome out;
  out.input = input;

  const std::vector<size_t>& offs =
      map.lhs_offsets.size() >= map.rhs_offsets.size() ? map.lhs_offsets : map.rhs_offsets;
  if (offs.empty() || budget == 0) return out;
  size_t k = std::min<size_t>(offs.size(), 8);
  size_t nbits = 8 * k;

  const DataCondition* obs = run(out.input, site).first_observation();
  ++out.execs;
  if (!obs || obs->bytes_kind) return out;
  uint64_t gap = operand_gap(*obs);

  for (size_t bit = nbits; bit-- > 0 && gap != 0;) {
    uint64_t step = 1ull << bit;
    for (int sign = 0; sign < 2; ++sign) {
      if (out.execs >= budget) {
        out.solved = gap == 0;
        return out;
      }
      uint64_t cur = pack(out.input, offs, k);
      uint64_t next = sign == 0 ? cur + step : cur - step;
      if (nbits < 64) next &= (1ull << nbits) - 1;
      Bytes cand = out.input;
      unpack(cand, offs, k, next);
      const DataCondition* o = run(cand, site).first_observation();
      ++out.execs;
      if (!o || o->bytes_kind) continue;
      uint64_t g = operand_gap(*o);
      if (g < gap) {
        gap = g;
        out.input = std::move(cand);
        break;
      }
    }
  }
  out.solved = gap == 0;
  return out;
}

void for_each_missed(const Bytes& input, const std::vector<bool>& covered,
                     const std::function<bool(const Bytes&)>& try_one) {
  Bytes v;
  for (size_t off = 0; off < input.size(); ++off) {
    if (off < covered.size() && covered[off]) continue;
    const uint8_t orig = input[off];
    const uint8_t variants[5] = {static_cast<uint8_t>(orig ^ 0xFF), static_cast<uint8_t>(orig + 1),
                                 static_cast<uint8_t>(orig - 1), 0x00, 0xFF};
    for (uint8_t nv : variants) {
      if (nv == orig) continue;
      v = input;
      v[off] = nv;
      if (try_one(v)) return;
    }
  }
}

Bytes random_mutate(const Bytes& input, std::mt19937_64& rng) {
  Bytes out = input;
  if (out.empty()) return out;
  size_t edits = 1 + rng() % 32;
  for (size_t i = 0; i < edits; ++i) {
    size_t pos = rng() % out.size();
    uint8_t old = out[pos];
    uint8_t v;
    do {
      v = static_cast<uint8_t>(rng());
    } while (v == old);
    out[pos] = v;
  }
  return out;
}

}  // namespace conff
