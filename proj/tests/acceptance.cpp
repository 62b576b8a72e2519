// Acceptance suite: ten end-to-end checks with hard bounds, one PASS/FAIL
// line each. Exit status is the number of failed checks.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "conff/bench.hpp"
#include "conff/byte_mapping.hpp"
#include "conff/campaign.hpp"
#include "conff/executor.hpp"
#include "conff/mutation.hpp"
#include "conff/parser.hpp"
#include "conff/scheduling.hpp"
#include "conff/static_analysis.hpp"
#include "helpers.hpp"

using namespace conff;
using testutil::RandomGraph;
using testutil::Runner;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

char detail_buf[256];

// --- 1. distance assignment vs an all-pairs oracle --------------------------

bool criterion1(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  int graphs_ok = 0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    RandomGraph g = testutil::make_random_graph(seed);
    TargetProgram p = parse_program(g.text);
    DistanceMap dm = assign_distances(p, build_graph(p, "t.c:1"));
    std::vector<uint32_t> want = testutil::oracle_distances(g);
    bool all = p.blocks.size() == want.size();
    for (size_t b = 0; all && b < want.size(); ++b) all = dm.dist[b] == want[b];
    graphs_ok += all;
  }
  double secs = seconds_since(t0);
  std::snprintf(detail_buf, sizeof detail_buf, "%d/100 graphs exact, %.2fs", graphs_ok, secs);
  detail = detail_buf;
  return graphs_ok == 100 && secs < 5.0;
}

// --- 2. byte attribution ground truth ---------------------------------------

bool criterion2(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  int exact = 0;
  for (uint64_t v = 0; v < 50; ++v) {
    WiringCase w = generate_wiring_case(v);
    Runner r(w.program);

    ProbeResult full;
    full.ranges = {{0, w.input.size()}};
    const DataCondition* base = r.fn()(w.input, w.site).first_observation();
    if (!base) continue;
    full.baseline = *base;
    full.tracked = true;
    full.execs = 1;

    ByteMap map = single_byte_probe(w.input, w.site, full, r.fn());
    std::vector<size_t> got = map.lhs_offsets;
    got.insert(got.end(), map.rhs_offsets.begin(), map.rhs_offsets.end());
    std::sort(got.begin(), got.end());
    got.erase(std::unique(got.begin(), got.end()), got.end());

    std::vector<size_t> want = w.expected;
    std::sort(want.begin(), want.end());
    exact += got == want;  // set equality <=> precision = recall = 1.0
  }
  double secs = seconds_since(t0);
  std::snprintf(detail_buf, sizeof detail_buf,
                "%d/50 offset sets exact (precision=recall=1.0), %.2fs", exact, secs);
  detail = detail_buf;
  return exact == 50 && secs < 30.0;
}

// --- 3. two-stage probing beats exhaustive single-byte work ------------------

bool criterion3(std::string& detail) {
  TargetProgram p = parse_program(
      "fn main() {\n"
      "  block b: br site=c ((in[512] + (in[513] * 256) + (in[514] * 65536) + (in[515] * "
      "16777216)) == 305419896) -> y, n\n"
      "  block y: ret 1\n"
      "  block n: ret 0\n"
      "}\n");
  Runner r(p);
  std::mt19937_64 rng(1);
  Bytes input(1024, 0);
  ByteMap map = build_byte_map(input, p.find_site("c"), 4, 4, rng, r.fn());
  bool mapped = map.lhs_offsets == std::vector<size_t>{512, 513, 514, 515};
  std::snprintf(detail_buf, sizeof detail_buf, "%" PRIu64 " execs vs 1024 exhaustive (cap 256)",
                map.probe_execs);
  detail = detail_buf;
  return mapped && map.probe_execs < 256;
}

// --- 4. four-gate magic chain: directed vs random ----------------------------

const char* kChain =
    "fn main() {\n"
    "  block g: br site=len (inlen < 64) -> reject, m0\n"
    "  block m0: br site=g0 (bytes(0, 4) == x\"DEADBEEF\") -> m1, reject\n"
    "  block m1: br site=g1 (bytes(16, 4) == x\"CAFEF00D\") -> m2, reject\n"
    "  block m2: br site=g2 (bytes(32, 4) == x\"FEEDFACE\") -> m3, reject\n"
    "  block m3: br site=g3 (bytes(48, 4) == x\"0BADF00D\") -> win, reject\n"
    "  block win: crash \"chain.c:1\" \"planted-reach\"\n ret 1\n"
    "  block reject: ret 0\n"
    "}\n";

bool criterion4(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  TargetProgram p = parse_program(kChain);

  CampaignConfig cfg;
  cfg.target_location = "chain.c:1";
  cfg.seeds = {Bytes(64, 0)};
  cfg.max_len = 64;
  cfg.max_execs = 20000;
  cfg.stop_on_target_crash = true;
  CampaignReport rep = run_campaign(p, cfg);
  bool directed_ok = rep.target_crash_found && rep.execs_to_target_crash <= 20000;

  int random_failures = 0;
  for (uint64_t rng = 1; rng <= 5; ++rng) {
    BaselineConfig bc;
    bc.target_location = "chain.c:1";
    bc.seeds = {Bytes(64, 0)};
    bc.max_len = 64;
    bc.max_execs = 10'000'000;
    bc.rng_seed = rng;
    BaselineResult res = run_random_fuzzer(p, bc);
    random_failures += !res.target_crash_found;
  }
  double secs = seconds_since(t0);
  std::snprintf(detail_buf, sizeof detail_buf,
                "directed crash at exec %" PRIu64 ", random 0/5 within 1e7, %.1fs",
                rep.execs_to_target_crash, secs);
  detail = detail_buf;
  return directed_ok && random_failures == 5 && secs < 120.0;
}

// --- 5. 16-bit checksum gate: binary enumeration bound ------------------------

bool criterion5(std::string& detail) {
  TargetProgram p = parse_program(
      "fn main() {\n"
      "  block b: br site=c ((in[0] + (in[1] * 256)) == (in[2] + (in[3] * 256))) -> y, n\n"
      "  block y: crash \"sum.c:1\" \"planted-reach\"\n ret 1\n"
      "  block n: ret 0\n"
      "}\n");
  int32_t site = p.find_site("c");
  Bytes input = {0x10, 0x00, 0x37, 0x02};  // lhs 16, rhs 567

  Runner r(p);
  std::mt19937_64 rng(1);
  ByteMap map = build_byte_map(input, site, 4, 2, rng, r.fn());
  bool wired = map.lhs_offsets == std::vector<size_t>{0, 1} &&
               map.rhs_offsets == std::vector<size_t>{2, 3};

  Runner solver(p);
  ChecksumOutcome out = solve_checksum(input, map, site, 64, solver.fn());
  bool replay_ok = false;
  if (out.solved) {
    ExecutionTrace t = execute(p, out.input);
    replay_ok = t.crash.has_value();
  }
  // 16 mapped bits -> at most 16 halving rounds, two trials each, plus the
  // baseline: 33 executions, comfortably inside the 64-exec bound.
  std::snprintf(detail_buf, sizeof detail_buf,
                "wired 2+2 bytes, solved in %" PRIu64 " execs (bound 64)", out.execs);
  detail = detail_buf;
  return wired && out.solved && out.execs <= 64 && replay_ok;
}

// --- 6. the worked two-function example, end to end ---------------------------

bool criterion6(std::string& detail) {
  TargetProgram p = parse_program(testutil::kWalkthrough);
  DistanceMap dm = assign_distances(p, build_graph(p, testutil::kWalkthroughTarget));
  std::vector<SiteInfo> infos = site_distances(p, dm);

  bool five_entries = infos.size() == 5;  // S1, S2 twice (own + via call), S3 once

  int32_t s1 = p.find_site("S1"), s2 = p.find_site("S2"), s3 = p.find_site("S3");
  bool latch_invalid = true;
  for (const SiteInfo& i : infos) latch_invalid &= i.invalid == (i.site == s3);

  CampaignConfig cfg;
  cfg.target_location = testutil::kWalkthroughTarget;
  cfg.seeds = {Bytes(4, 0)};
  cfg.max_len = 8;
  cfg.max_execs = 5000;
  cfg.stop_on_target_crash = true;
  CampaignReport rep = run_campaign(p, cfg);

  // Constraint focus follows ascending distance: the magic compare (best
  // published distance 2) is solved before the range check (distance 1)
  // becomes visible, and no focused round ever touches the loop latch.
  std::vector<int32_t> probed;
  for (const EventRow& e : rep.events)
    if (e.phase == "probe" && e.event.rfind("map ", 0) == 0) probed.push_back(e.site);
  bool order_ok = probed.size() == 2 && probed[0] == s2 && probed[1] == s1;
  for (int32_t s : probed) order_ok &= s != s3;

  std::snprintf(detail_buf, sizeof detail_buf,
                "5 site entries, latch invalid, focus order ok, crash at exec %" PRIu64,
                rep.execs_to_target_crash);
  detail = detail_buf;
  return five_entries && latch_invalid && order_ok && rep.target_crash_found;
}

// --- 7. scheduling ablation: distance+coverage vs fifo ------------------------

bool criterion7(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<uint64_t> dinvc_execs, fifo_execs;
  int wins = 0;
  for (uint64_t v = 0; v < 10; ++v) {
    BenchProgram b = generate_bench(BenchKind::Mixed, 3, v);
    size_t need = std::max({b.solving_input.size(), b.recommended_seed.size(), size_t{64}});

    uint64_t execs[2];
    SeedPolicy pols[2] = {SeedPolicy::DistanceInvCoverage, SeedPolicy::Fifo};
    for (int i = 0; i < 2; ++i) {
      CampaignConfig cfg;
      cfg.target_location = b.target_location;
      cfg.seeds = {b.recommended_seed};
      cfg.max_len = need;
      cfg.max_execs = 200000;
      cfg.policy = pols[i];
      cfg.stop_on_target_crash = true;
      cfg.log_events = false;
      CampaignReport rep = run_campaign(b.program, cfg);
      execs[i] = rep.target_crash_found ? rep.execs_to_target_crash : cfg.max_execs;
    }
    dinvc_execs.push_back(execs[0]);
    fifo_execs.push_back(execs[1]);
    wins += execs[0] < execs[1];
  }

  auto median = [](std::vector<uint64_t> v) {
    std::sort(v.begin(), v.end());
    return (static_cast<double>(v[4]) + static_cast<double>(v[5])) / 2.0;
  };
  double md = median(dinvc_execs), mf = median(fifo_execs);
  double secs = seconds_since(t0);
  std::snprintf(detail_buf, sizeof detail_buf,
                "median execs %.0f (dinvc) vs %.0f (fifo), dinvc wins %d/10, %.1fs", md, mf,
                wins, secs);
  detail = detail_buf;
  return md <= mf && wins >= 6 && secs < 600.0;
}

// --- 8. three scheduling-semantics properties, 1000 random cases each ---------

bool property_round_discipline(std::string& note) {
  // In every focused round: at most three probe attempts, and none after
  // the round's constraint is satisfied.
  BenchKind kinds[5] = {BenchKind::MagicChain, BenchKind::ChecksumGate, BenchKind::SwitchMaze,
                        BenchKind::LengthGate, BenchKind::Mixed};
  uint64_t satisfied_total = 0;
  for (uint64_t v = 0; v < 1000; ++v) {
    BenchProgram b = generate_bench(kinds[v % 5], 2, v);
    CampaignConfig cfg;
    cfg.target_location = b.target_location;
    cfg.seeds = {b.recommended_seed};
    cfg.max_len = std::max({b.solving_input.size(), b.recommended_seed.size(), size_t{64}});
    cfg.max_execs = 1500;
    cfg.stop_on_target_crash = true;
    CampaignReport rep = run_campaign(b.program, cfg);

    uint64_t maps_this_round = 0;
    bool satisfied_this_round = false;
    for (const EventRow& e : rep.events) {
      if (e.event.rfind("pop ", 0) == 0) {
        maps_this_round = 0;
        satisfied_this_round = false;
      } else if (e.phase == "probe" && e.event.rfind("map ", 0) == 0) {
        if (satisfied_this_round) return false;  // probe after early exit
        if (++maps_this_round > 3) return false;
      } else if (e.event == "satisfied") {
        satisfied_this_round = true;
        ++satisfied_total;
      }
    }
  }
  note = "rounds respect top-3 and early exit, " + std::to_string(satisfied_total) +
         " satisfactions seen";
  return satisfied_total > 100;  // the property must not hold vacuously
}

bool property_offer_monotonic(std::string& note) {
  std::mt19937_64 rng(99);
  SeedPolicy pols[4] = {SeedPolicy::Fifo, SeedPolicy::Distance, SeedPolicy::DistanceCoverage,
                        SeedPolicy::DistanceInvCoverage};
  uint64_t arrival = 0;
  auto random_entry = [&]() {
    SeedEntry e;
    uint32_t ds[5] = {0, 1, 2, 5, kUnreachable};
    e.distance = ds[rng() % 5];
    e.hits = rng() % 5;
    e.total = 4;
    e.arrival = arrival++;
    e.input = Bytes(1 + rng() % 2, static_cast<uint8_t>(rng() % 3));
    return e;
  };

  uint64_t accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    SeedQueue q(pols[rng() % 4]);
    std::set<Bytes> ref_seen;
    size_t k = rng() % 6;
    for (size_t j = 0; j < k; ++j) {
      SeedEntry e = random_entry();
      ref_seen.insert(e.input);
      q.push(std::move(e));
    }
    SeedEntry current = random_entry();
    bool with_current = rng() % 4 != 0;
    SeedEntry cand = random_entry();

    // The acceptance rule, restated independently: an offer lands only on
    // an empty queue or when it would schedule strictly ahead of the seed
    // being fuzzed, and never for byte strings seen before.
    bool expect = (q.empty() || (with_current && q.before(cand, current))) &&
                  ref_seen.count(cand.input) == 0;
    size_t size_before = q.size();
    bool got = q.offer(cand, with_current ? &current : nullptr);
    if (got != expect) return false;
    if (q.size() != size_before + (expect ? 1 : 0)) return false;
    accepted += got;
  }
  note += " / offers matched the rule (" + std::to_string(accepted) + " accepted)";
  return accepted > 50;
}

bool property_filter_top3(std::string& note) {
  std::mt19937_64 rng(7);
  for (uint64_t i = 0; i < 1000; ++i) {
    RandomGraph g = testutil::make_random_graph(5000 + i);
    TargetProgram p = parse_program(g.text);
    DistanceMap dm = assign_distances(p, build_graph(p, "t.c:1"));
    std::vector<SiteInfo> infos = site_distances(p, dm);

    Bytes input(rng() % 9, 0);
    for (uint8_t& b : input) b = static_cast<uint8_t>(rng());
    ExecutionTrace trace = execute(p, input);

    AttemptedSet attempted;
    for (const SiteHit& h : trace.sites_hit)
      if (rng() % 3 == 0) attempted.insert({h.site, h.edge});

    auto got = filter_constraints(p, dm, infos, trace, attempted);

    // Independent recomputation of the whole filter.
    std::vector<int32_t> first_edge(p.sites.size(), -1);
    for (const SiteHit& h : trace.sites_hit)
      if (first_edge[static_cast<size_t>(h.site)] < 0) first_edge[static_cast<size_t>(h.site)] = h.edge;

    auto succ_of = [&](size_t site, size_t edge) -> int32_t {
      const Terminator& t = p.blocks[static_cast<size_t>(p.sites[site].block)].term;
      if (t.kind == TermKind::CondBranch) return edge == 0 ? t.target_true : t.target_false;
      if (t.kind == TermKind::Switch)
        return edge < t.cases.size() ? t.cases[edge].target : t.default_target;
      return -1;
    };
    std::vector<ConstraintCandidate> want;
    for (size_t s = 0; s < p.sites.size(); ++s) {
      if (first_edge[s] < 0) continue;
      uint32_t best = kUnreachable;
      bool invalid = false;
      for (const SiteInfo& si : infos)
        if (si.site == static_cast<int32_t>(s)) {
          invalid = si.invalid;
          if (!si.invalid && si.distance != kUnreachable) best = std::min(best, si.distance);
        }
      (void)invalid;
      if (best == kUnreachable) continue;
      uint8_t edge = static_cast<uint8_t>(first_edge[s]);
      if (attempted.count({static_cast<int32_t>(s), edge})) continue;
      const Terminator& t = p.blocks[static_cast<size_t>(p.sites[s].block)].term;
      size_t edge_count = t.kind == TermKind::Switch ? t.cases.size() + 1 : 2;
      uint32_t taken = dm.of(succ_of(s, edge));
      bool improvable = false;
      for (size_t e = 0; e < edge_count; ++e)
        if (e != edge && dm.of(succ_of(s, e)) < taken) improvable = true;
      if (!improvable) continue;
      want.push_back({static_cast<int32_t>(s), edge, best});
    }
    std::sort(want.begin(), want.end(), [](const ConstraintCandidate& a, const ConstraintCandidate& b) {
      return a.distance != b.distance ? a.distance < b.distance : a.site < b.site;
    });
    if (want.size() > 3) want.resize(3);

    if (got.size() != want.size()) return false;
    for (size_t j = 0; j < got.size(); ++j)
      if (got[j].site != want[j].site || got[j].taken_edge != want[j].taken_edge ||
          got[j].distance != want[j].distance)
        return false;
  }
  note += " / filter equals its reference on 1000 graphs";
  return true;
}

bool criterion8(std::string& detail) {
  std::string note;
  bool a = property_round_discipline(note);
  bool b = property_offer_monotonic(note);
  bool c = property_filter_top3(note);
  detail = note;
  return a && b && c;
}

// --- 9. determinism of whole campaigns ----------------------------------------

bool criterion9(std::string& detail) {
  struct Pick {
    BenchKind kind;
    size_t depth;
    uint64_t variant;
  } picks[3] = {{BenchKind::MagicChain, 2, 0}, {BenchKind::ChecksumGate, 2, 1},
                {BenchKind::Mixed, 3, 2}};
  for (const Pick& pk : picks) {
    BenchProgram b = generate_bench(pk.kind, pk.depth, pk.variant);
    std::string report, csv;
    for (int rep = 0; rep < 3; ++rep) {
      CampaignConfig cfg;
      cfg.target_location = b.target_location;
      cfg.seeds = {b.recommended_seed};
      cfg.max_len = std::max({b.solving_input.size(), b.recommended_seed.size(), size_t{64}});
      cfg.max_execs = 100000;
      cfg.stop_on_target_crash = true;
      CampaignReport r = run_campaign(b.program, cfg);
      std::ostringstream os;
      write_event_csv(os, r);
      if (rep == 0) {
        report = serialize_report(r);
        csv = os.str();
      } else if (report != serialize_report(r) || csv != os.str()) {
        detail = "repetition diverged on " + b.name;
        return false;
      }
    }
  }
  detail = "3 programs x 3 repetitions, reports and event logs byte-identical";
  return true;
}

// --- 10. crash fidelity ---------------------------------------------------------

bool criterion10(std::string& detail) {
  struct Case {
    TargetProgram program;
    std::string target;
  };
  std::vector<Case> cases;

  // A program with an off-path crash next to the planted one.
  cases.push_back({parse_program("fn main() {\n"
                                 "  block g: br site=len (inlen < 4) -> reject, s0\n"
                                 "  block s0: br site=side (in[0] == 255) -> sc, g0\n"
                                 "  block sc: crash \"side.c:9\" \"stack-overflow\"\n ret 2\n"
                                 "  block g0: br site=m (in[1] == 170) -> win, reject\n"
                                 "  block win: crash \"main.c:5\" \"heap-overflow\"\n ret 1\n"
                                 "  block reject: ret 0\n"
                                 "}\n"),
                   "main.c:5"});
  for (auto [kind, variant] : {std::pair{BenchKind::Mixed, uint64_t{0}},
                               std::pair{BenchKind::MagicChain, uint64_t{1}},
                               std::pair{BenchKind::SwitchMaze, uint64_t{2}}}) {
    BenchProgram b = generate_bench(kind, 2, variant);
    cases.push_back({b.program, b.target_location});
  }

  size_t replayed = 0;
  for (const Case& c : cases) {
    CampaignConfig cfg;
    cfg.target_location = c.target;
    cfg.seeds = {Bytes(4, 1)};
    cfg.max_len = 64;
    cfg.max_execs = 30000;
    CampaignReport rep = run_campaign(c.program, cfg);
    if (rep.crashes.size() != rep.crash_inputs.size()) return false;
    for (size_t i = 0; i < rep.crashes.size(); ++i) {
      ExecutionTrace t = execute(c.program, rep.crash_inputs[i]);
      if (!t.crash.has_value()) {
        detail = "crash input did not replay";
        return false;
      }
      if (t.crash->dedup_key() != rep.crashes[i].dedup_key()) {
        detail = "replay produced a different dedup key";
        return false;
      }
      ++replayed;
    }
  }
  std::snprintf(detail_buf, sizeof detail_buf,
                "%zu reported crash inputs replayed with matching dedup keys", replayed);
  detail = detail_buf;
  return replayed >= 3;
}

}  // namespace

int main() {
  struct Check {
    int id;
    const char* name;
    bool (*fn)(std::string&);
  } checks[] = {
      {1, "distance assignment matches the all-pairs oracle", criterion1},
      {2, "single-byte probing recovers exact operand offsets", criterion2},
      {3, "two-stage probing stays under a quarter of exhaustive cost", criterion3},
      {4, "directed campaign cracks the magic chain, random search does not", criterion4},
      {5, "16-bit checksum gate solved within the binary-enumeration bound", criterion5},
      {6, "worked example: site table, invalid latch, focus order, crash", criterion6},
      {7, "distance/coverage scheduling beats fifo on the generated suite", criterion7},
      {8, "round discipline, offer gating, and constraint filter properties", criterion8},
      {9, "campaigns are deterministic per configuration", criterion9},
      {10, "every reported crash input replays with the same dedup key", criterion10},
  };

  int failures = 0;
  for (const Check& c : checks) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s%s%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail.empty() ? "" : " [", detail.c_str(), detail.empty() ? "" : "]");
    std::fflush(stdout);
    failures += !ok;
  }
  std::printf("%d/10 acceptance checks passed\n", 10 - failures);
  return failures;
}
