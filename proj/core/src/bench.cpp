#include "conff/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

#include "conff/parser.hpp"

namespace conff {

BenchKind bench_kind_from_name(const std::string& name) {
  if (name == "magic") return BenchKind::MagicChain;
  if (name == "checksum") return BenchKind::ChecksumGate;
  if (name == "switch") return BenchKind::SwitchMaze;
  if (name == "length") return BenchKind::LengthGate;
  if (name == "mixed") return BenchKind::Mixed;
  throw std::invalid_argument("unknown benchmark kind '" + name +
                              "' (expected magic, checksum, switch, length, mixed)");
}

const char* bench_kind_name(BenchKind kind) {
  switch (kind) {
    case BenchKind::MagicChain: return "magic";
    case BenchKind::ChecksumGate: return "checksum";
    case BenchKind::SwitchMaze: return "switch";
    case BenchKind::LengthGate: return "length";
    case BenchKind::Mixed: return "mixed";
  }
  return "?";
}

namespace {

std::string hexlit(const Bytes& b) {
  static const char digits[] = "0123456789ABCDEF";
  std::string s = "x\"";
  for (uint8_t v : b) {
    s += digits[v >> 4];
    s += digits[v & 15];
  }
  s += '"';
  return s;
}

std::string to_hex(const Bytes& b) {
  static const char digits[] = "0123456789abcdef";
  std::string s;
  for (uint8_t v : b) {
    s += digits[v >> 4];
    s += digits[v & 15];
  }
  return s;
}

// Byte in [lo, 255] distinct from `avoid`.
uint8_t pick_byte(std::mt19937_64& rng, uint8_t lo, uint8_t avoid) {
  for (;;) {
    uint8_t v = static_cast<uint8_t>(lo + rng() % (256 - lo));
    if (v != avoid) return v;
  }
}

// Sum expression over in[base] .. in[base+7].
std::string sum_expr(size_t base) {
  std::string s;
  for (size_t i = 0; i < 8; ++i) {
    if (i) s += " + ";
    s += "in[" + std::to_string(base + i) + "]";
  }
  return s;
}

}  // namespace

BenchProgram generate_bench(BenchKind kind, size_t depth, uint64_t variant) {
  if (depth < 1 || depth > 64) throw std::invalid_argument("depth must be in [1, 64]");
  if (kind == BenchKind::LengthGate && depth > 10)
    throw std::invalid_argument("length chains cap at depth 10");

  std::mt19937_64 rng(variant * 1000003 + depth * 101 + static_cast<uint64_t>(kind));
  BenchProgram out;
  out.kind = kind;
  out.depth = depth;
  out.name = std::string(bench_kind_name(kind)) + "_d" + std::to_string(depth) + "_v" +
             std::to_string(variant);
  out.target_location = out.name + ".c:1";

  std::ostringstream body;
  std::vector<std::string> gate_sites;  // site ids in gate order, for truths

  auto block_name = [](size_t i) { return "g" + std::to_string(i); };
  auto next_name = [&](size_t i, size_t d) { return i + 1 == d ? std::string("win") : block_name(i + 1); };

  switch (kind) {
    case BenchKind::MagicChain: {
      out.min_len = 4 * depth;
      out.recommended_seed.assign(out.min_len, 0x00);
      body << "  block entry:\n    br site=guard (inlen < " << out.min_len
           << ") -> reject, g0\n";
      for (size_t i = 0; i < depth; ++i) {
        Bytes magic(4);
        for (auto& v : magic) v = pick_byte(rng, 1, 0);
        size_t base = 4 * i;
        body << "  block " << block_name(i) << ":\n    br site=m" << i << " (bytes(" << base
             << ", 4) == " << hexlit(magic) << ") -> " << next_name(i, depth) << ", reject\n";
        GateTruth g;
        g.kind = "magic";
        for (size_t o = base; o < base + 4; ++o) g.offsets.push_back(o);
        g.value = magic;
        gate_sites.push_back("m" + std::to_string(i));
        out.gates.push_back(std::move(g));
        out.solving_input.insert(out.solving_input.end(), magic.begin(), magic.end());
      }
      break;
    }
    case BenchKind::ChecksumGate: {
      out.min_len = 10 * depth;
      out.recommended_seed.assign(out.min_len, 0x01);
      body << "  block entry:\n    br site=guard (inlen < " << out.min_len
           << ") -> reject, g0\n";
      for (size_t i = 0; i < depth; ++i) {
        size_t base = 10 * i;
        body << "  block " << block_name(i) << ":\n"
             << "    l" << i << " = " << sum_expr(base) << "\n"
             << "    r" << i << " = in[" << base + 8 << "] + (in[" << base + 9 << "] * 256)\n"
             << "    br site=c" << i << " (l" << i << " == r" << i << ") -> "
             << next_name(i, depth) << ", reject\n";
        // Window passing the gate: 0xFF + 0x02 + zeros sums to 257 = LE16(01 01).
        Bytes window = {0xFF, 0x02, 0, 0, 0, 0, 0, 0, 0x01, 0x01};
        GateTruth g;
        g.kind = "checksum";
        for (size_t o = base; o < base + 10; ++o) g.offsets.push_back(o);
        g.value = window;
        gate_sites.push_back("c" + std::to_string(i));
        out.gates.push_back(std::move(g));
        out.solving_input.insert(out.solving_input.end(), window.begin(), window.end());
      }
      break;
    }
    case BenchKind::SwitchMaze: {
      out.min_len = depth;
      out.recommended_seed.assign(out.min_len, 0x00);
      body << "  block entry:\n    br site=guard (inlen < " << out.min_len
           << ") -> reject, g0\n";
      for (size_t i = 0; i < depth; ++i) {
        uint8_t win = pick_byte(rng, 1, 0);
        uint8_t decoy = pick_byte(rng, 1, win);
        body << "  block " << block_name(i) << ":\n    switch site=s" << i << " (in[" << i
             << "]) [ " << unsigned{win} << " -> " << next_name(i, depth) << ", "
             << unsigned{decoy} << " -> bonus" << i << " ] default reject\n"
             << "  block bonus" << i << ":\n    jmp reject\n";
        GateTruth g;
        g.kind = "switch";
        g.offsets.push_back(i);
        g.value = {win};
        gate_sites.push_back("s" + std::to_string(i));
        out.gates.push_back(std::move(g));
        GateTruth d;
        d.kind = "decoy";
        d.offsets.push_back(i);
        d.value = {decoy};
        out.gates.push_back(std::move(d));
        gate_sites.push_back("s" + std::to_string(i));
        out.solving_input.push_back(win);
      }
      break;
    }
    case BenchKind::LengthGate: {
      out.min_len = size_t{8} << (depth - 1);
      out.recommended_seed.assign(4, 0x00);
      for (size_t i = 0; i < depth; ++i) {
        size_t need = size_t{8} << i;
        body << "  block " << block_name(i) << ":\n    br site=l" << i << " (inlen < " << need
             << ") -> reject, " << next_name(i, depth) << "\n";
        GateTruth g;
        g.kind = "length";
        g.required_len = need;
        gate_sites.push_back("l" + std::to_string(i));
        out.gates.push_back(std::move(g));
      }
      out.solving_input.assign(out.min_len, 0x00);
      break;
    }
    case BenchKind::Mixed: {
      const size_t stride = 12;
      out.min_len = stride * depth;
      out.recommended_seed.assign(out.min_len, 0x01);
      out.solving_input.assign(out.min_len, 0x01);
      body << "  block entry:\n    br site=guard (inlen < " << out.min_len
           << ") -> reject, g0\n";
      for (size_t i = 0; i < depth; ++i) {
        size_t base = stride * i;
        size_t decoy_off = base + 10;
        // Decoy branch first: 0xFE == 0x01 ^ 0xFF, so the per-byte fallback
        // finds it and floods the queue with bonus-path seeds.
        body << "  block " << block_name(i) << ":\n    br site=d" << i << " (in[" << decoy_off
             << "] == 254) -> bonus" << i << ", g" << i << "m\n"
             << "  block bonus" << i << ":\n    jmp g" << i << "m\n";
        GateTruth dt;
        dt.kind = "decoy";
        dt.offsets.push_back(decoy_off);
        dt.value = {0xFE};
        gate_sites.push_back("d" + std::to_string(i));
        out.gates.push_back(std::move(dt));

        GateTruth g;
        switch (i % 3) {
          case 0: {
            Bytes magic(4);
            for (auto& v : magic) v = pick_byte(rng, 2, 0);
            body << "  block g" << i << "m:\n    br site=m" << i << " (bytes(" << base
                 << ", 4) == " << hexlit(magic) << ") -> " << next_name(i, depth)
                 << ", reject\n";
            g.kind = "magic";
            for (size_t o = base; o < base + 4; ++o) g.offsets.push_back(o);
            g.value = magic;
            gate_sites.push_back("m" + std::to_string(i));
            std::copy(magic.begin(), magic.end(), out.solving_input.begin() + static_cast<long>(base));
            break;
          }
          case 1: {
            uint8_t win = pick_byte(rng, 2, 0);
            body << "  block g" << i << "m:\n    switch site=s" << i << " (in[" << base
                 << "]) [ " << unsigned{win} << " -> " << next_name(i, depth)
                 << " ] default reject\n";
            g.kind = "switch";
            g.offsets.push_back(base);
            g.value = {win};
            gate_sites.push_back("s" + std::to_string(i));
            out.solving_input[base] = win;
            break;
          }
          default: {
            body << "  block g" << i << "m:\n"
                 << "    l" << i << " = " << sum_expr(base) << "\n"
                 << "    r" << i << " = in[" << base + 8 << "] + (in[" << base + 9
                 << "] * 256)\n"
                 << "    br site=c" << i << " (l" << i << " == r" << i << ") -> "
                 << next_name(i, depth) << ", reject\n";
            Bytes window = {0xFF, 0x02, 0, 0, 0, 0, 0, 0, 0x01, 0x01};
            g.kind = "checksum";
            for (size_t o = base; o < base + 10; ++o) g.offsets.push_back(o);
            g.value = window;
            gate_sites.push_back("c" + std::to_string(i));
            std::copy(window.begin(), window.end(), out.solving_input.begin() + static_cast<long>(base));
            break;
          }
        }
        out.gates.push_back(std::move(g));
      }
      break;
    }
  }

  std::ostringstream text;
  text << "fn main() {\n"
       << body.str()
       << "  block win:\n    crash \"" << out.target_location << "\" \"planted-reach\"\n"
       << "    ret 1\n"
       << "  block reject:\n    ret 0\n"
       << "}\n";
  out.program = parse_program(text.str());

  for (size_t i = 0; i < out.gates.size(); ++i)
    out.gates[i].site = out.program.find_site(gate_sites[i]);

  ExecutionTrace t = execute(out.program, std::span<const uint8_t>(out.solving_input.data(),
                                                                   out.solving_input.size()));
  if (!t.crash || t.crash->location != out.target_location)
    throw std::logic_error("benchmark self-check failed for " + out.name);
  return out;
}

std::string bench_ground_truth_json(const BenchProgram& b) {
  nlohmann::json j;
  j["name"] = b.name;
  j["kind"] = bench_kind_name(b.kind);
  j["depth"] = b.depth;
  j["target_location"] = b.target_location;
  j["min_len"] = b.min_len;
  j["recommended_seed"] = to_hex(b.recommended_seed);
  j["solving_input"] = to_hex(b.solving_input);
  j["gates"] = nlohmann::json::array();
  for (const GateTruth& g : b.gates) {
    nlohmann::json gj;
    gj["kind"] = g.kind;
    gj["site"] = g.site;
    gj["site_id"] = g.site >= 0 ? b.program.sites[static_cast<size_t>(g.site)].id : "";
    gj["offsets"] = g.offsets;
    gj["value"] = to_hex(g.value);
    if (g.required_len) gj["required_len"] = g.required_len;
    j["gates"].push_back(std::move(gj));
  }
  return j.dump(2) + "\n";
}

WiringCase generate_wiring_case(uint64_t variant) {
  std::mt19937_64 rng(variant * 2654435761 + 17);
  WiringCase wc;
  size_t len = 16 + rng() % 49;
  wc.input.resize(len);
  for (auto& v : wc.input) v = static_cast<uint8_t>(rng());

  std::ostringstream cond;
  switch (rng() % 4) {
    case 0: {
      size_t off = rng() % len;
      cond << "in[" << off << "] == " << rng() % 256;
      wc.expected = {off};
      break;
    }
    case 1: {
      size_t w = 2 + rng() % 3;
      size_t off = rng() % (len - w + 1);
      uint64_t coeff = 1;
      for (size_t i = 0; i < w; ++i) {
        if (i) cond << " + ";
        cond << "(in[" << off + i << "] * " << coeff << ")";
        coeff <<= 8;
        wc.expected.push_back(off + i);
      }
      cond << " == " << rng() % (1ull << (8 * w));
      break;
    }
    case 2: {
      size_t k = 2 + rng() % 4;
      std::set<size_t> offs;
      while (offs.size() < k) offs.insert(rng() % len);
      bool first = true;
      for (size_t o : offs) {
        if (!first) cond << " + ";
        cond << "in[" << o << "]";
        first = false;
        wc.expected.push_back(o);
      }
      cond << " == " << rng() % 2048;
      break;
    }
    default: {
      size_t w = 2 + rng() % 5;
      size_t off = rng() % (len - w + 1);
      Bytes want(w);
      for (auto& v : want) v = static_cast<uint8_t>(rng());
      cond << "bytes(" << off << ", " << w << ") == " << hexlit(want);
      for (size_t i = 0; i < w; ++i) wc.expected.push_back(off + i);
      break;
    }
  }

  std::ostringstream text;
  text << "fn main() {\n  block entry:\n    br site=w (" << cond.str()
       << ") -> yes, no\n  block yes:\n    ret 1\n  block no:\n    ret 0\n}\n";
  wc.program = parse_program(text.str());
  wc.site = wc.program.find_site("w");
  return wc;
}

namespace {

Bytes havoc_mutate(const Bytes& base, std::mt19937_64& rng, size_t max_len) {
  Bytes v = base;
  size_t ops = 1 + rng() % 32;
  for (size_t i = 0; i < ops; ++i) {
    switch (rng() % 8) {
      case 0:
        if (v.size() < max_len)
          v.insert(v.begin() + static_cast<long>(rng() % (v.size() + 1)),
                   static_cast<uint8_t>(rng()));
        break;
      case 1:
        if (!v.empty()) v.erase(v.begin() + static_cast<long>(rng() % v.size()));
        break;
      case 2:
        if (!v.empty() && v.size() < max_len) {
          size_t n = std::min<size_t>(1 + rng() % v.size(), max_len - v.size());
          v.insert(v.end(), v.begin(), v.begin() + static_cast<long>(n));
        }
        break;
      default:
        if (!v.empty()) v[rng() % v.size()] = static_cast<uint8_t>(rng());
        break;
    }
  }
  return v;
}

template <typename OnTrace>
BaselineResult baseline_loop(const TargetProgram& p, const BaselineConfig& cfg,
                             OnTrace&& pick_and_note) {
  auto t0 = std::chrono::steady_clock::now();
  BaselineResult r;
  Executor ex(p);
  std::unordered_set<std::string> crashes;
  ExecutionTrace t;

  auto run1 = [&](const Bytes& in) {
    ex.run(std::span<const uint8_t>(in.data(), in.size()), -1, cfg.step_budget, t);
    ++r.execs;
    if (t.crash) {
      if (crashes.insert(t.crash->dedup_key()).second) ++r.unique_crashes;
      if (t.crash->location == cfg.target_location) {
        if (!r.target_crash_found) {
          r.target_crash_found = true;
          r.execs_to_target_crash = r.execs;
        }
        if (cfg.stop_on_target_crash) return true;
      }
    }
    return false;
  };

  pick_and_note(run1, t);
  r.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

BaselineResult run_random_fuzzer(const TargetProgram& p, const BaselineConfig& cfg) {
  std::vector<Bytes> seeds = cfg.seeds;
  if (seeds.empty()) seeds.push_back(Bytes{});
  std::mt19937_64 rng(cfg.rng_seed);
  return baseline_loop(p, cfg, [&](auto& run1, ExecutionTrace&) {
    uint64_t done = 0;
    for (const Bytes& s : seeds) {
      if (done++ >= cfg.max_execs || run1(s)) return;
    }
    size_t idx = 0;
    while (done < cfg.max_execs) {
      ++done;
      if (run1(havoc_mutate(seeds[idx % seeds.size()], rng, cfg.max_len))) return;
      ++idx;
    }
  });
}

BaselineResult run_coverage_fuzzer(const TargetProgram& p, const BaselineConfig& cfg) {
  std::vector<Bytes> corpus = cfg.seeds;
  if (corpus.empty()) corpus.push_back(Bytes{});
  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<bool> covered(p.blocks.size(), false);
  return baseline_loop(p, cfg, [&](auto& run1, ExecutionTrace& t) {
    auto new_blocks = [&]() {
      bool fresh = false;
      for (int32_t b : t.path)
        if (!covered[static_cast<size_t>(b)]) {
          covered[static_cast<size_t>(b)] = true;
          fresh = true;
        }
      return fresh;
    };
    uint64_t done = 0;
    for (const Bytes& s : corpus) {
      if (done++ >= cfg.max_execs || run1(s)) return;
      new_blocks();
    }
    size_t idx = 0;
    while (done < cfg.max_execs) {
      Bytes v = havoc_mutate(corpus[idx % corpus.size()], rng, cfg.max_len);
      ++idx;
      ++done;
      if (run1(v)) return;
      if (new_blocks()) corpus.push_back(std::move(v));
    }
  });
}

std::vector<CompareRow> run_comparison(const std::vector<BenchProgram>& programs,
                                       uint64_t max_execs, uint64_t rng_seed,
                                       SeedPolicy policy) {
  std::vector<CompareRow> rows;
  for (const BenchProgram& b : programs) {
    size_t max_len = std::max({b.solving_input.size(), b.recommended_seed.size(), size_t{64}});

    CampaignConfig cc;
    cc.target_location = b.target_location;
    cc.seeds = {b.recommended_seed};
    cc.max_execs = max_execs;
    cc.max_len = max_len;
    cc.policy = policy;
    cc.rng_seed = rng_seed;
    cc.stop_on_target_crash = true;
    cc.log_events = false;
    CampaignReport rep = run_campaign(b.program, cc);
    rows.push_back({b.name, "conff", rep.target_crash_found,
                    rep.target_crash_found ? rep.execs_to_target_crash : rep.execs, rep.wall_ms});

    BaselineConfig bc;
    bc.target_location = b.target_location;
    bc.seeds = {b.recommended_seed};
    bc.max_execs = max_execs;
    bc.max_len = max_len;
    bc.rng_seed = rng_seed;
    BaselineResult rr = run_random_fuzzer(b.program, bc);
    rows.push_back({b.name, "random", rr.target_crash_found,
                    rr.target_crash_found ? rr.execs_to_target_crash : rr.execs, rr.wall_ms});
    BaselineResult cv = run_coverage_fuzzer(b.program, bc);
    rows.push_back({b.name, "coverage", cv.target_crash_found,
                    cv.target_crash_found ? cv.execs_to_target_crash : cv.execs, cv.wall_ms});
  }
  return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "program,fuzzer,execs_to_crash,walltime_ms,found\n";
  char buf[32];
  for (const CompareRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    os << r.program << ',' << r.fuzzer << ',' << r.execs_to_crash << ',' << buf << ','
       << (r.found ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace conff
