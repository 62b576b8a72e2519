#include "conff/scheduling.hpp"

#include <algorithm>
#include <stdexcept>

namespace conff {

SeedPolicy seed_policy_from_name(const std::string& name) {
  if (name == "fifo") return SeedPolicy::Fifo;
  if (name == "d") return SeedPolicy::Distance;
  if (name == "dc") return SeedPolicy::DistanceCoverage;
  if (name == "dinvc") return SeedPolicy::DistanceInvCoverage;
  throw std::invalid_argument("unknown seed policy '" + name + "' (expected fifo, d, dc, dinvc)");
}

const char* seed_policy_name(SeedPolicy policy) {
  switch (policy) {
    case SeedPolicy::Fifo: return "fifo";
    case SeedPolicy::Distance: return "d";
    case SeedPolicy::DistanceCoverage: return "dc";
    case SeedPolicy::DistanceInvCoverage: return "dinvc";
  }
  return "?";
}

uint64_t seed_priority(uint32_t distance, uint64_t hits, uint64_t total) {
  if (hits == 0 || distance == kUnreachable) return UINT64_MAX;
  const uint64_t m8 = 100000000ull;
  const uint64_t m16 = m8 * m8;
  // (D * 1e8) mod 1e16 == (D mod 1e8) * 1e8, and 1/C == total/hits.
  uint64_t d_term = (distance % m8) * m8;
  uint64_t inv_c = total * m8 / hits;
  return (d_term + inv_c) % m16;
}

namespace {

// a.hits/a.total <=> b.hits/b.total by cross multiplication.
int coverage_cmp(const SeedEntry& a, const SeedEntry& b) {
  unsigned __int128 lhs = static_cast<unsigned __int128>(a.hits) * b.total;
  unsigned __int128 rhs = static_cast<unsigned __int128>(b.hits) * a.total;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

}  // namespace

bool SeedQueue::Cmp::operator()(const SeedEntry& a, const SeedEntry& b) const {
  if (policy == SeedPolicy::Fifo) return a.arrival < b.arrival;

  bool a_un = a.distance == kUnreachable;
  bool b_un = b.distance == kUnreachable;
  if (a_un != b_un) return !a_un;
  if (!a_un) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (policy == SeedPolicy::DistanceCoverage) {
      int c = coverage_cmp(a, b);
      if (c != 0) return c < 0;
    } else if (policy == SeedPolicy::DistanceInvCoverage) {
      int c = coverage_cmp(a, b);
      if (c != 0) return c > 0;
    }
  }
  return a.arrival < b.arrival;
}

bool SeedQueue::before(const SeedEntry& a, const SeedEntry& b) const {
  return Cmp{policy_}(a, b);
}

void SeedQueue::push(SeedEntry e) {
  seen_.insert(e.input);
  entries_.insert(std::move(e));
}

bool SeedQueue::offer(SeedEntry e, const SeedEntry* current) {
  bool ahead = entries_.empty() || (current && before(e, *current));
  if (!ahead) return false;
  if (!seen_.insert(e.input).second) return false;
  entries_.insert(std::move(e));
  return true;
}

SeedEntry SeedQueue::pop_best() {
  SeedEntry e = *entries_.begin();
  entries_.erase(entries_.begin());
  return e;
}

SeedStats seed_stats(const TargetProgram& p, const std::vector<SiteInfo>& infos,
                     const ExecutionTrace& trace) {
  SeedStats st;
  st.total = p.sites.empty() ? 1 : p.sites.size();

  std::vector<bool> hit(p.sites.size(), false);
  for (const SiteHit& h : trace.sites_hit) {
    if (!hit[static_cast<size_t>(h.site)]) {
      hit[static_cast<size_t>(h.site)] = true;
      ++st.hits;
    }
  }
  for (const SiteInfo& si : infos) {
    if (si.distance == kUnreachable) continue;
    if (!hit[static_cast<size_t>(si.site)]) continue;
    st.distance = std::min(st.distance, si.distance);
  }
  return st;
}

std::vector<ConstraintCandidate> filter_constraints(const TargetProgram& p, const DistanceMap& dm,
                                                    const std::vector<SiteInfo>& infos,
                                                    const ExecutionTrace& trace,
                                                    const AttemptedSet& attempted, size_t keep) {
  // Edge each hit site took first.
  std::vector<int32_t> first_edge(p.sites.size(), -1);
  for (const SiteHit& h : trace.sites_hit)
    if (first_edge[static_cast<size_t>(h.site)] < 0)
      first_edge[static_cast<size_t>(h.site)] = h.edge;

  // Best usable published distance per hit site.
  std::vector<uint32_t> best(p.sites.size(), kUnreachable);
  for (const SiteInfo& si : infos) {
    if (si.invalid || si.distance == kUnreachable) continue;
    if (first_edge[static_cast<size_t>(si.site)] < 0) continue;
    uint32_t& slot = best[static_cast<size_t>(si.site)];
    slot = std::min(slot, si.distance);
  }

  std::vector<ConstraintCandidate> out;
  for (size_t s = 0; s < p.sites.size(); ++s) {
    if (first_edge[s] < 0 || best[s] == kUnreachable) continue;
    uint8_t edge = static_cast<uint8_t>(first_edge[s]);
    if (attempted.count({static_cast<int32_t>(s), edge})) continue;

    // Flipping must be able to move execution strictly closer to the target.
    const Terminator& t = p.blocks[static_cast<size_t>(p.sites[s].block)].term;
    size_t edge_count = t.kind == TermKind::Switch ? t.cases.size() + 1 : 2;
    uint32_t taken_d = edge_successor_distance(p, dm, static_cast<int32_t>(s), edge);
    bool improvable = false;
    for (size_t e = 0; e < edge_count && !improvable; ++e) {
      if (e == edge) continue;
      improvable = edge_successor_distance(p, dm, static_cast<int32_t>(s),
                                           static_cast<uint8_t>(e)) < taken_d;
    }
    if (!improvable) continue;

    ConstraintCandidate c;
    c.site = static_cast<int32_t>(s);
    c.taken_edge = edge;
    c.distance = best[s];
    out.push_back(c);
  }

  std::sort(out.begin(), out.end(), [](const ConstraintCandidate& a, const ConstraintCandidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.site < b.site;
  });
  if (out.size() > keep) out.resize(keep);
  return out;
}

}  // namespace conff
