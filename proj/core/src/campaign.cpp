#include "conff/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "conff/byte_mapping.hpp"
#include "conff/length_detection.hpp"
#include "conff/mutation.hpp"

namespace conff {

bool judge_satisfaction(const TargetProgram& p, const DistanceMap& dm, int32_t site,
                        uint8_t old_edge, const ExecutionTrace& after) {
  const SiteHit* h = after.first_hit(site);
  if (!h || h->edge == old_edge) return false;
  uint32_t d_new = edge_successor_distance(p, dm, site, h->edge);
  uint32_t d_old = edge_successor_distance(p, dm, site, old_edge);
  return d_new < d_old;
}

namespace {

struct StopCampaign {};

std::string distance_str(uint32_t d) {
  return d == kUnreachable ? std::string("inf") : std::to_string(d);
}

class Driver {
 public:
  Driver(const TargetProgram& p, const CampaignConfig& cfg)
      : p_(p), cfg_(cfg), exec_(p), queue_(cfg.policy), rng_(cfg.rng_seed) {
    run_offer_ = [this](const Bytes& in, int32_t f) -> const ExecutionTrace& {
      return run_one(in, f, true);
    };
    run_skip_ = [this](const Bytes& in, int32_t f) -> const ExecutionTrace& {
      return run_one(in, f, false);
    };
  }

  CampaignReport run();

 private:
  // Executes one input: counts it, tracks best distance/coverage, records
  // crashes, and (when offer is set) lets the result enter the seed queue —
  // force-pushed when it took a globally unseen (site, edge), gate-checked
  // against the working seed otherwise.
  const ExecutionTrace& run_one(const Bytes& input, int32_t focus, bool offer) {
    if (rep_.execs >= cfg_.max_execs) throw StopCampaign{};
    exec_.run(std::span<const uint8_t>(input.data(), input.size()), focus, cfg_.step_budget,
              trace_);
    ++rep_.execs;
    ++since_improve_;

    SeedStats st = seed_stats(p_, infos_, trace_);
    if (st.distance < rep_.best_distance) {
      rep_.best_distance = st.distance;
      since_improve_ = 0;
      note("best_distance=" + distance_str(st.distance));
    }
    if (st.hits > rep_.best_hits) rep_.best_hits = st.hits;

    bool new_edge = false;
    for (const SiteHit& h : trace_.sites_hit) {
      uint64_t key = (static_cast<uint64_t>(static_cast<uint32_t>(h.site)) << 8) | h.edge;
      if (seen_edges_.insert(key).second) new_edge = true;
    }

    if (offer) {
      SeedEntry e;
      e.input = input;
      e.distance = st.distance;
      e.hits = st.hits;
      e.total = st.total;
      e.arrival = queue_.next_arrival();
      if (new_edge) queue_.push(std::move(e));
      else queue_.offer(std::move(e), current_);
    }

    if (trace_.crash) {
      const CrashRecord& cr = *trace_.crash;
      if (seen_crashes_.insert(cr.dedup_key()).second) {
        rep_.crashes.push_back(cr);
        rep_.crash_inputs.push_back(input);
        note("crash " + cr.dedup_key());
      }
      if (cr.location == cfg_.target_location) {
        if (!rep_.target_crash_found) {
          rep_.target_crash_found = true;
          rep_.execs_to_target_crash = rep_.execs;
          note("target crash");
        }
        if (cfg_.stop_on_target_crash) throw StopCampaign{};
      }
    }
    return trace_;
  }

  void note(std::string ev) {
    if (!cfg_.log_events) return;
    // Commas would break the CSV row.
    std::replace(ev.begin(), ev.end(), ',', ';');
    rep_.events.push_back(
        {rep_.execs, phase_, focus_site_, rep_.best_distance, rep_.best_hits, std::move(ev)});
  }

  void fuzz_seed(SeedEntry cur);

  const TargetProgram& p_;
  const CampaignConfig& cfg_;
  Executor exec_;
  SeedQueue queue_;
  std::mt19937_64 rng_;

  StaticGraph graph_;
  DistanceMap dm_;
  std::vector<SiteInfo> infos_;

  RunFn run_offer_, run_skip_;
  ExecutionTrace trace_;
  const SeedEntry* current_ = nullptr;
  AttemptedSet attempted_;
  std::unordered_set<uint64_t> seen_edges_;
  std::unordered_set<std::string> seen_crashes_;
  uint64_t since_improve_ = 0;
  std::string phase_ = "init";
  int32_t focus_site_ = -1;

  CampaignReport rep_;
};

void Driver::fuzz_seed(SeedEntry cur) {
  ++rep_.seeds_processed;
  phase_ = "seed";
  focus_site_ = -1;
  current_ = nullptr;
  note("pop len=" + std::to_string(cur.input.size()) + " d=" + distance_str(cur.distance) +
       " p=" +
       (seed_priority(cur.distance, cur.hits, cur.total) == UINT64_MAX
            ? std::string("-")
            : std::to_string(seed_priority(cur.distance, cur.hits, cur.total))));

  phase_ = "length";
  Bytes adjusted = detect_length(cur.input, cfg_.max_len, rng_, run_skip_);

  phase_ = "seed";
  const ExecutionTrace& base = run_one(adjusted, -1, false);
  SeedStats st = seed_stats(p_, infos_, base);
  cur.input = adjusted;
  cur.distance = st.distance;
  cur.hits = st.hits;
  cur.total = st.total;
  current_ = &cur;

  std::vector<ConstraintCandidate> candidates =
      filter_constraints(p_, dm_, infos_, base, attempted_, cfg_.constraints_per_seed);

  std::vector<bool> covered(adjusted.size(), false);
  bool satisfied_any = false;

  for (const ConstraintCandidate& cand : candidates) {
    attempted_.insert({cand.site, cand.taken_edge});
    phase_ = "probe";
    focus_site_ = cand.site;

    DataCondition baseline;
    ByteMap map =
        build_byte_map(adjusted, cand.site, cfg_.probe_m, cfg_.probe_leaf, rng_, run_offer_,
                       &baseline);
    // A byte comparison whose observed slice is cut short by the end of the
    // input can never match. Length detection misses this when the site set
    // is length-insensitive, so grow here until the sides agree (or the
    // ceiling stops us) and probe again.
    while (map.tracked && baseline.bytes_kind && baseline.lhs_len != baseline.rhs_len &&
           adjusted.size() < cfg_.max_len) {
      size_t deficit = std::max(baseline.lhs_len, baseline.rhs_len) -
                       std::min(baseline.lhs_len, baseline.rhs_len);
      size_t want = std::max(adjusted.size() + deficit, adjusted.size() * 2);
      adjusted.resize(std::min(cfg_.max_len, want), 0);
      uint64_t spent = map.probe_execs;
      map = build_byte_map(adjusted, cand.site, cfg_.probe_m, cfg_.probe_leaf, rng_, run_offer_,
                           &baseline);
      map.probe_execs += spent;
    }
    Bytes sat_input;
    bool satisfied = false;

    if (map.tracked && classify(map) == ConditionClass::FixedToFixed &&
        adjusted.size() < cfg_.max_len) {
      // No byte we have moves either operand, yet the site is improvable:
      // the condition may read past the end of the input, or watch inlen
      // itself. Length is the one lever left. Walk longer lengths with
      // random tail bytes; when the operands move, adopt that length and
      // probe again (an input-reading condition maps now), and when the
      // map stays empty keep climbing so a pure length check can flip.
      phase_ = "stretch";
      size_t len = adjusted.size();
      while (!satisfied && len < cfg_.max_len) {
        len = std::min(cfg_.max_len, std::max(len + 1, len * 2));
        bool moved = false;
        for (int attempt = 0; attempt < 4 && !satisfied; ++attempt) {
          Bytes v = adjusted;
          v.resize(len, 0);
          for (size_t o = adjusted.size(); o < len; ++o) v[o] = static_cast<uint8_t>(rng_());
          const ExecutionTrace& t = run_one(v, cand.site, true);
          if (judge_satisfaction(p_, dm_, cand.site, cand.taken_edge, t)) {
            sat_input = std::move(v);
            satisfied = true;
          } else if (const DataCondition* obs = t.first_observation();
                     obs && (!obs->same_lhs(baseline) || !obs->same_rhs(baseline))) {
            moved = true;
          }
        }
        if (satisfied || !moved) continue;
        phase_ = "probe";
        adjusted.resize(len, 0);
        uint64_t spent = map.probe_execs;
        map = build_byte_map(adjusted, cand.site, cfg_.probe_m, cfg_.probe_leaf, rng_,
                             run_offer_, &baseline);
        map.probe_execs += spent;
        if (classify(map) != ConditionClass::FixedToFixed) break;
        phase_ = "stretch";
      }
    }

    phase_ = "probe";
    if (adjusted.size() > covered.size()) covered.resize(adjusted.size(), false);
    note("map lhs=" + std::to_string(map.lhs_offsets.size()) +
         " rhs=" + std::to_string(map.rhs_offsets.size()) +
         " execs=" + std::to_string(map.probe_execs));
    for (size_t o : map.lhs_offsets) covered[o] = true;
    for (size_t o : map.rhs_offsets) covered[o] = true;

    if (!map.tracked) continue;
    ConditionClass cls = classify(map);

    if (satisfied) {
      // fall through to the push below
    } else if (cls == ConditionClass::FixedToFixed) {
      continue;
    } else if (cls == ConditionClass::FixedToMapped || baseline.bytes_kind) {
      phase_ = "magic";
      std::optional<int64_t> desired = switch_desired_value(p_, dm_, cand.site, cand.taken_edge);
      for (const Bytes& v : solve_magic(adjusted, map, baseline, desired)) {
        const ExecutionTrace& t = run_one(v, cand.site, true);
        if (judge_satisfaction(p_, dm_, cand.site, cand.taken_edge, t)) {
          sat_input = v;
          satisfied = true;
          break;
        }
      }
    } else {
      phase_ = "checksum";
      ChecksumOutcome oc = solve_checksum(adjusted, map, cand.site, cfg_.checksum_budget,
                                          run_offer_);
      if (oc.solved) {
        const ExecutionTrace& t = run_one(oc.input, cand.site, true);
        if (judge_satisfaction(p_, dm_, cand.site, cand.taken_edge, t)) {
          sat_input = std::move(oc.input);
          satisfied = true;
        }
      }
    }

    if (!satisfied) {
      phase_ = "random";
      std::vector<size_t> offs = map.lhs_offsets;
      offs.insert(offs.end(), map.rhs_offsets.begin(), map.rhs_offsets.end());
      std::sort(offs.begin(), offs.end());
      offs.erase(std::unique(offs.begin(), offs.end()), offs.end());
      for (uint64_t i = 0; i < cfg_.mapped_random_budget && !offs.empty(); ++i) {
        Bytes v = adjusted;
        for (size_t o : offs) v[o] = static_cast<uint8_t>(rng_());
        const ExecutionTrace& t = run_one(v, cand.site, true);
        if (judge_satisfaction(p_, dm_, cand.site, cand.taken_edge, t)) {
          sat_input = std::move(v);
          satisfied = true;
          break;
        }
      }
    }

    if (satisfied) {
      ++rep_.satisfied_constraints;
      note("satisfied");
      if (!queue_.known(sat_input)) {
        SeedStats ss = seed_stats(p_, infos_, trace_);
        SeedEntry e;
        e.input = std::move(sat_input);
        e.distance = ss.distance;
        e.hits = ss.hits;
        e.total = ss.total;
        e.arrival = queue_.next_arrival();
        queue_.push(std::move(e));
      }
      satisfied_any = true;
      break;  // drop the remaining constraints of this round
    }
  }

  focus_site_ = -1;
  if (!satisfied_any) {
    phase_ = "missed";
    for_each_missed(adjusted, covered, [&](const Bytes& v) {
      run_one(v, -1, true);
      return false;
    });
    if (since_improve_ >= cfg_.stagnation_limit) {
      phase_ = "burst";
      note("random burst");
      for (uint64_t i = 0; i < cfg_.random_burst; ++i) run_one(random_mutate(adjusted, rng_), -1, true);
    }
  }

  current_ = nullptr;
  phase_ = "seed";
  if (cur.distance != kUnreachable) {
    cur.arrival = queue_.next_arrival();
    note("requeue");
    queue_.push(std::move(cur));
  } else {
    note("drop");
  }
}

CampaignReport Driver::run() {
  auto t0 = std::chrono::steady_clock::now();
  if (cfg_.max_len == 0 || cfg_.max_len > kMaxInputCap)
    throw SetupError("max_len must be between 1 and " + std::to_string(kMaxInputCap));

  rep_.target_location = cfg_.target_location;
  rep_.total_sites = p_.sites.empty() ? 1 : p_.sites.size();

  graph_ = build_graph(p_, cfg_.target_location);
  dm_ = assign_distances(p_, graph_);
  infos_ = site_distances(p_, dm_);

  note("start policy=" + std::string(seed_policy_name(cfg_.policy)) +
       " rng=" + std::to_string(cfg_.rng_seed));
  try {
    std::vector<Bytes> seeds = cfg_.seeds;
    if (seeds.empty()) seeds.push_back(Bytes{});
    std::set<Bytes> uniq;
    for (Bytes& s : seeds) {
      if (s.size() > cfg_.max_len) s.resize(cfg_.max_len);
      if (!uniq.insert(s).second) continue;
      const ExecutionTrace& t = run_one(s, -1, false);
      SeedStats st = seed_stats(p_, infos_, t);
      SeedEntry e;
      e.input = std::move(s);
      e.distance = st.distance;
      e.hits = st.hits;
      e.total = st.total;
      e.arrival = queue_.next_arrival();
      queue_.push(std::move(e));
    }

    while (!queue_.empty() && rep_.execs < cfg_.max_execs) fuzz_seed(queue_.pop_best());
  } catch (StopCampaign&) {
  }

  phase_ = "done";
  focus_site_ = -1;
  note("end execs=" + std::to_string(rep_.execs));
  rep_.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();
  return std::move(rep_);
}

}  // namespace

CampaignReport run_campaign(const TargetProgram& p, const CampaignConfig& cfg) {
  Driver d(p, cfg);
  return d.run();
}

std::string serialize_report(const CampaignReport& r) {
  std::ostringstream os;
  os << "target: " << r.target_location << "\n";
  os << "execs: " << r.execs << "\n";
  os << "seeds_processed: " << r.seeds_processed << "\n";
  os << "satisfied_constraints: " << r.satisfied_constraints << "\n";
  os << "best_distance: " << distance_str(r.best_distance) << "\n";
  os << "best_coverage: " << r.best_hits << "/" << r.total_sites << "\n";
  if (r.target_crash_found)
    os << "target_crash: found at exec " << r.execs_to_target_crash << "\n";
  else
    os << "target_crash: not found\n";
  os << "unique_crashes: " << r.crashes.size() << "\n";
  for (size_t i = 0; i < r.crashes.size(); ++i)
    os << "crash: " << r.crashes[i].location << " " << r.crashes[i].type
       << " input_len=" << r.crash_inputs[i].size() << "\n";
  return os.str();
}

void write_event_csv(std::ostream& os, const CampaignReport& r) {
  os << "exec#,phase,site_id,D_best,C_best,event\n";
  char cbuf[32];
  for (const EventRow& e : r.events) {
    double c = static_cast<double>(e.c_best_hits) / static_cast<double>(r.total_sites);
    std::snprintf(cbuf, sizeof cbuf, "%.6f", c);
    os << e.exec << ',' << e.phase << ',' << e.site << ',' << distance_str(e.d_best) << ','
       << cbuf << ',' << e.event << '\n';
  }
}

}  // namespace conff
