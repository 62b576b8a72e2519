// Command-line front end: fuzz, bench gen, bench compare, graph, validate.
// Exit codes: 0 success, 1 setup/input problems, 2 usage errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "conff/bench.hpp"
#include "conff/campaign.hpp"
#include "conff/parser.hpp"
#include "conff/static_analysis.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

conff::Bytes read_bytes(const std::string& path) {
  std::string s = read_text(path);
  return conff::Bytes(s.begin(), s.end());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

void write_bytes(const std::string& path, const conff::Bytes& b) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

conff::Bytes from_hex(const std::string& s) {
  if (s.size() % 2) throw std::runtime_error("hex string needs an even digit count");
  conff::Bytes out;
  for (size_t i = 0; i < s.size(); i += 2) {
    int hi = hex_digit(s[i]), lo = hex_digit(s[i + 1]);
    if (hi < 0 || lo < 0) throw std::runtime_error("bad hex digit in seed");
    out.push_back(static_cast<uint8_t>(hi * 16 + lo));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conff: directed fuzzer with constraint filtering and focusing"};
  app.require_subcommand(1);

  // --- fuzz ---
  auto* fuzz = app.add_subcommand("fuzz", "run a directed campaign against one crash location");
  std::string fz_program, fz_target, fz_report, fz_events, fz_crash_dir, fz_policy = "dinvc";
  std::vector<std::string> fz_seed_files, fz_seed_hex;
  conff::CampaignConfig cc;
  bool fz_quiet = false;
  fuzz->add_option("program", fz_program, "program text file")->required();
  fuzz->add_option("--target", fz_target, "crash location to steer toward (e.g. lib.c:104)")
      ->required();
  fuzz->add_option("--seed-file", fz_seed_files, "initial seed file (repeatable)");
  fuzz->add_option("--seed-hex", fz_seed_hex, "initial seed as hex digits (repeatable)");
  fuzz->add_option("--max-execs", cc.max_execs, "execution budget")->capture_default_str();
  fuzz->add_option("--step-budget", cc.step_budget, "interpreter steps per execution")
      ->capture_default_str();
  fuzz->add_option("--max-len", cc.max_len, "input length ceiling")->capture_default_str();
  fuzz->add_option("--probe-m", cc.probe_m, "segments per probing level")->capture_default_str();
  fuzz->add_option("--probe-leaf", cc.probe_leaf, "segment size probed per byte")
      ->capture_default_str();
  fuzz->add_option("--constraints", cc.constraints_per_seed, "constraints kept per seed round")
      ->capture_default_str();
  fuzz->add_option("--checksum-budget", cc.checksum_budget, "execs per checksum descent")
      ->capture_default_str();
  fuzz->add_option("--random-budget", cc.mapped_random_budget,
                   "random execs on mapped bytes per constraint")
      ->capture_default_str();
  fuzz->add_option("--stagnation", cc.stagnation_limit,
                   "execs without distance progress before havoc bursts")
      ->capture_default_str();
  fuzz->add_option("--random-burst", cc.random_burst, "havoc execs per stagnated round")
      ->capture_default_str();
  fuzz->add_option("--seed-policy", fz_policy, "fifo, d, dc, dinvc")->capture_default_str();
  fuzz->add_option("--rng", cc.rng_seed, "deterministic RNG seed")->capture_default_str();
  fuzz->add_flag("--stop-on-crash", cc.stop_on_target_crash,
                 "stop at the first target-location crash");
  fuzz->add_option("--report", fz_report, "write the campaign report to this file");
  fuzz->add_option("--events", fz_events, "write the event log CSV to this file");
  fuzz->add_option("--crash-dir", fz_crash_dir, "write unique crash inputs into this directory");
  fuzz->add_flag("--quiet", fz_quiet, "suppress the report on stdout");

  // --- bench ---
  auto* bench = app.add_subcommand("bench", "synthetic benchmark programs");
  bench->require_subcommand(1);

  auto* gen = bench->add_subcommand("gen", "generate programs with ground truth");
  std::string g_kind = "magic", g_dir = ".";
  size_t g_depth = 2;
  uint64_t g_variant = 0, g_count = 1;
  gen->add_option("--kind", g_kind, "magic, checksum, switch, length, mixed")
      ->capture_default_str();
  gen->add_option("--depth", g_depth, "gates in the chain")->capture_default_str();
  gen->add_option("--variant", g_variant, "first variant id")->capture_default_str();
  gen->add_option("--count", g_count, "how many variants to emit")->capture_default_str();
  gen->add_option("--out-dir", g_dir, "output directory")->capture_default_str();

  auto* cmp = bench->add_subcommand("compare", "run directed vs baseline fuzzers");
  std::string c_kinds = "magic,checksum,switch,length,mixed", c_policy = "dinvc", c_out;
  size_t c_depth = 2;
  uint64_t c_variants = 2, c_max_execs = 200000, c_rng = 1;
  cmp->add_option("--kinds", c_kinds, "comma-separated benchmark kinds")->capture_default_str();
  cmp->add_option("--depth", c_depth, "gates per program")->capture_default_str();
  cmp->add_option("--variants", c_variants, "variants per kind")->capture_default_str();
  cmp->add_option("--max-execs", c_max_execs, "execution budget per fuzzer")
      ->capture_default_str();
  cmp->add_option("--rng", c_rng, "RNG seed for every fuzzer")->capture_default_str();
  cmp->add_option("--policy", c_policy, "seed policy for the directed campaign")
      ->capture_default_str();
  cmp->add_option("--out", c_out, "write the CSV here instead of stdout");

  // --- graph ---
  auto* graph = app.add_subcommand("graph", "emit the block graph as DOT with distances");
  std::string gr_program, gr_target, gr_out;
  graph->add_option("program", gr_program, "program text file")->required();
  graph->add_option("--target", gr_target, "crash location")->required();
  graph->add_option("--out", gr_out, "write DOT here instead of stdout");

  // --- validate ---
  auto* val = app.add_subcommand("validate", "parse and check a program");
  std::string v_program;
  val->add_option("program", v_program, "program text file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fuzz->parsed()) {
      conff::TargetProgram p = conff::parse_program(read_text(fz_program));
      cc.target_location = fz_target;
      cc.policy = conff::seed_policy_from_name(fz_policy);
      for (const std::string& f : fz_seed_files) cc.seeds.push_back(read_bytes(f));
      for (const std::string& h : fz_seed_hex) cc.seeds.push_back(from_hex(h));
      conff::CampaignReport rep = conff::run_campaign(p, cc);

      std::string text = conff::serialize_report(rep);
      if (!fz_quiet) std::cout << text;
      if (!fz_report.empty()) write_text(fz_report, text);
      if (!fz_events.empty()) {
        std::ostringstream os;
        conff::write_event_csv(os, rep);
        write_text(fz_events, os.str());
      }
      if (!fz_crash_dir.empty()) {
        std::filesystem::create_directories(fz_crash_dir);
        std::string index;
        for (size_t i = 0; i < rep.crashes.size(); ++i) {
          char name[32];
          std::snprintf(name, sizeof name, "crash_%03zu.bin", i);
          write_bytes(fz_crash_dir + "/" + name, rep.crash_inputs[i]);
          index += std::string(name) + " " + rep.crashes[i].location + " " +
                   rep.crashes[i].type + "\n";
        }
        write_text(fz_crash_dir + "/crashes.txt", index);
      }
      return 0;
    }

    if (gen->parsed()) {
      conff::BenchKind kind = conff::bench_kind_from_name(g_kind);
      std::filesystem::create_directories(g_dir);
      for (uint64_t v = g_variant; v < g_variant + g_count; ++v) {
        conff::BenchProgram bp = conff::generate_bench(kind, g_depth, v);
        std::string base = g_dir + "/" + bp.name;
        write_text(base + ".prog", conff::serialize_program(bp.program));
        write_text(base + ".json", conff::bench_ground_truth_json(bp));
        write_bytes(base + ".seed", bp.recommended_seed);
        std::cout << bp.name << "\n";
      }
      return 0;
    }

    if (cmp->parsed()) {
      std::vector<conff::BenchProgram> programs;
      std::stringstream ks(c_kinds);
      std::string k;
      while (std::getline(ks, k, ',')) {
        if (k.empty()) continue;
        conff::BenchKind kind = conff::bench_kind_from_name(k);
        for (uint64_t v = 0; v < c_variants; ++v)
          programs.push_back(conff::generate_bench(kind, c_depth, v));
      }
      std::vector<conff::CompareRow> rows = conff::run_comparison(
          programs, c_max_execs, c_rng, conff::seed_policy_from_name(c_policy));
      std::string csv = conff::compare_csv(rows);
      if (c_out.empty()) std::cout << csv;
      else write_text(c_out, csv);
      return 0;
    }

    if (graph->parsed()) {
      conff::TargetProgram p = conff::parse_program(read_text(gr_program));
      conff::StaticGraph g = conff::build_graph(p, gr_target);
      conff::DistanceMap dm = conff::assign_distances(p, g);
      std::string dot = conff::write_dot(p, g, dm);
      if (gr_out.empty()) std::cout << dot;
      else write_text(gr_out, dot);
      return 0;
    }

    if (val->parsed()) {
      conff::TargetProgram p = conff::parse_program(read_text(v_program));
      std::vector<conff::Diagnostic> ds = conff::validate(p);
      if (ds.empty()) {
        std::cout << "ok: " << p.functions.size() << " functions, " << p.blocks.size()
                  << " blocks, " << p.sites.size() << " sites\n";
        return 0;
      }
      for (const conff::Diagnostic& d : ds) std::cerr << d.message << "\n";
      return 1;
    }
  } catch (const conff::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
