// End-to-end checks of the command-line tool. argv[1] is the tool path.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

static int failures = 0;

#define EXPECT(cond)                                                      \
  do {                                                                    \
    if (!(cond)) {                                                        \
      std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond);         \
      ++failures;                                                         \
    }                                                                     \
  } while (0)

static std::string tool;
static fs::path tmp;

static int run(const std::string& args) {
  std::string cmd = tool + " " + args;
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

static std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

static void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: cli_tests <tool path>\n");
    return 1;
  }
  tool = argv[1];
  tmp = fs::path("cli_tmp");
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  const std::string t = tmp.string();
  const std::string null = " > /dev/null 2>&1";

  // validate: clean program accepted, broken program rejected with exit 1.
  write_file(tmp / "ok.prog",
             "fn main() {\n"
             "  block b: br site=s (in[0] == 7) -> y, n\n"
             "  block y: crash \"ok.c:1\" \"boom\"\n ret 1\n"
             "  block n: ret 0\n"
             "}\n");
  write_file(tmp / "bad.prog", "fn main() { block b: jmp nowhere }\n");
  EXPECT(run("validate " + t + "/ok.prog" + null) == 0);
  EXPECT(run("validate " + t + "/bad.prog" + null) == 1);
  EXPECT(run("validate " + t + "/missing.prog" + null) == 1);

  // usage problems exit 2, help exits 0.
  EXPECT(run("frobnicate" + null) == 2);
  EXPECT(run(null.substr(1)) == 2);  // no subcommand at all
  EXPECT(run("--help" + null) == 0);
  EXPECT(run("fuzz" + null) == 2);  // missing required arguments

  // bench gen: three files per program.
  EXPECT(run("bench gen --kind magic --depth 2 --variant 0 --out-dir " + t + null) == 0);
  EXPECT(fs::exists(tmp / "magic_d2_v0.prog"));
  EXPECT(fs::exists(tmp / "magic_d2_v0.json"));
  EXPECT(fs::exists(tmp / "magic_d2_v0.seed"));
  EXPECT(slurp(tmp / "magic_d2_v0.json").find("\"target_location\"") != std::string::npos);

  // graph: dot rendering of the generated program.
  EXPECT(run("graph " + t + "/magic_d2_v0.prog --target magic_d2_v0.c:1 --out " + t +
             "/g.dot" + null) == 0);
  std::string dot = slurp(tmp / "g.dot");
  EXPECT(dot.find("digraph") != std::string::npos);
  EXPECT(dot.find("d=0") != std::string::npos);

  // fuzz: crack the generated chain, write report, events, crash inputs.
  const std::string fuzz_args =
      "fuzz " + t + "/magic_d2_v0.prog --target magic_d2_v0.c:1 --seed-file " + t +
      "/magic_d2_v0.seed --max-execs 50000 --stop-on-crash --quiet --report " + t +
      "/run.report --events " + t + "/run.csv --crash-dir " + t + "/crashes";
  EXPECT(run(fuzz_args + null) == 0);
  std::string report = slurp(tmp / "run.report");
  EXPECT(report.find("target_crash: found at exec ") != std::string::npos);
  EXPECT(report.find("unique_crashes: 1") != std::string::npos);
  std::string csv = slurp(tmp / "run.csv");
  EXPECT(csv.rfind("exec#,phase,site_id,D_best,C_best,event\n", 0) == 0);
  EXPECT(csv.find("target crash") != std::string::npos);
  EXPECT(fs::exists(tmp / "crashes" / "crash_000.bin"));
  EXPECT(fs::exists(tmp / "crashes" / "crashes.txt"));

  // identical configuration, identical outputs.
  EXPECT(run("fuzz " + t + "/magic_d2_v0.prog --target magic_d2_v0.c:1 --seed-file " + t +
             "/magic_d2_v0.seed --max-execs 50000 --stop-on-crash --quiet --report " + t +
             "/run2.report --events " + t + "/run2.csv" + null) == 0);
  EXPECT(slurp(tmp / "run.report") == slurp(tmp / "run2.report"));
  EXPECT(slurp(tmp / "run.csv") == slurp(tmp / "run2.csv"));

  // unknown target location is a setup error: exit 1.
  EXPECT(run("fuzz " + t + "/magic_d2_v0.prog --target nope.c:9 --quiet" + null) == 1);

  // seed policies are validated.
  EXPECT(run("fuzz " + t + "/magic_d2_v0.prog --target magic_d2_v0.c:1 --seed-policy best" +
             null) != 0);

  // bench compare: CSV with one row per program and fuzzer.
  EXPECT(run("bench compare --kinds magic,length --depth 1 --variants 1 --max-execs 20000 "
             "--out " + t + "/cmp.csv" + null) == 0);
  std::string cmp = slurp(tmp / "cmp.csv");
  EXPECT(cmp.rfind("program,fuzzer,execs_to_crash,walltime_ms,found\n", 0) == 0);
  size_t lines = 0;
  for (char ch : cmp) lines += ch == '\n';
  EXPECT(lines == 7);  // header + 2 programs x 3 fuzzers

  if (failures == 0) {
    std::printf("cli_tests: all checks passed\n");
    fs::remove_all(tmp);
  } else {
    std::printf("cli_tests: %d failures (artifacts kept in %s)\n", failures, t.c_str());
  }
  return failures == 0 ? 0 : 1;
}
