// Shared test fixtures: program texts, random graph programs with an
// independent distance oracle, and small byte helpers.

#ifndef CONFF_TESTS_HELPERS_HPP
#define CONFF_TESTS_HELPERS_HPP

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "conff/campaign.hpp"
#include "conff/executor.hpp"
#include "conff/parser.hpp"
#include "conff/static_analysis.hpp"

namespace testutil {

using conff::Bytes;

inline Bytes bytes_of(std::initializer_list<int> xs) {
  Bytes b;
  for (int x : xs) b.push_back(static_cast<uint8_t>(x));
  return b;
}

inline Bytes zeros(size_t n) { return Bytes(n, 0); }

// Two-function sample: a length-bounded loop in main calls a checker whose
// magic compare guards a byte-range check in front of the planted crash.
// Hand-derived facts used by tests:
//   distances  c_crash 0, c_magic 1, c_entry 2, m_body 3,
//              m_entry/m_latch/c_fail 4, m_done unreachable
//   sites      S3 (loop latch, invalid), S2 (magic), S1 (range check)
//   published  S1@1, S2@2 own; S1@3, S2@3 through the call; S3@4 -> 5 rows
inline const char* kWalkthrough = R"(
fn main() {
  block m_entry:
    i = 0
    jmp m_body
  block m_body:
    r = call check(i)
    i = i + 1
    jmp m_latch
  block m_latch:
    br site=S3 (i < inlen) -> m_body, m_done
  block m_done:
    ret 0
}

fn check(i) {
  block c_entry:
    br site=S2 (bytes(0, 3) == x"7F454C") -> c_magic, c_fail
  block c_magic:
    br site=S1 (in[3] > 128) -> c_crash, c_fail
  block c_crash:
    crash "decomp.c:104" "heap-buffer-overflow"
    ret 1
  block c_fail:
    ret 0
}
)";

inline const char* kWalkthroughTarget = "decomp.c:104";

// Random single-function control-flow graph with known edges, for checking
// distances against an all-pairs oracle computed straight off the intended
// edge list.
struct RandomGraph {
  std::string text;
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // intended block-index edges
  std::vector<int> crash_blocks;
};

inline RandomGraph make_random_graph(uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 3);
  RandomGraph g;
  g.n = 3 + static_cast<int>(rng() % 48);

  size_t n_crash = 1 + rng() % 2;
  while (g.crash_blocks.size() < n_crash) {
    int b = static_cast<int>(rng() % g.n);
    bool dup = false;
    for (int c : g.crash_blocks) dup |= c == b;
    if (!dup) g.crash_blocks.push_back(b);
  }

  std::ostringstream os;
  os << "fn main() {\n";
  int site = 0;
  for (int b = 0; b < g.n; ++b) {
    os << "  block b" << b << ":\n";
    for (int c : g.crash_blocks)
      if (c == b) os << "    crash \"t.c:1\" \"boom\"\n";
    uint64_t pick = rng() % 100;
    auto tgt = [&]() { return static_cast<int>(rng() % g.n); };
    if (pick < 50) {
      int t = tgt(), f = tgt();
      os << "    br site=s" << site++ << " (in[" << rng() % 4 << "] < " << rng() % 7 << ") -> b"
         << t << ", b" << f << "\n";
      g.edges.push_back({b, t});
      g.edges.push_back({b, f});
    } else if (pick < 70) {
      size_t cases = 2 + rng() % 2;
      os << "    switch site=s" << site++ << " (in[0]) [ ";
      for (size_t c = 0; c < cases; ++c) {
        int t = tgt();
        if (c) os << ", ";
        os << c << " -> b" << t;
        g.edges.push_back({b, t});
      }
      int d = tgt();
      os << " ] default b" << d << "\n";
      g.edges.push_back({b, d});
    } else if (pick < 85) {
      int t = tgt();
      os << "    jmp b" << t << "\n";
      g.edges.push_back({b, t});
    } else {
      os << "    ret 0\n";
    }
  }
  os << "}\n";
  g.text = os.str();
  return g;
}

// Execution hook with an exec counter, for driving the probing and
// mutation primitives directly.
struct Runner {
  conff::Executor ex;
  conff::ExecutionTrace trace;
  uint64_t execs = 0;

  explicit Runner(const conff::TargetProgram& p) : ex(p) {}
  conff::RunFn fn() {
    return [this](const Bytes& in, int32_t focus) -> const conff::ExecutionTrace& {
      ex.run(in, focus, conff::kDefaultStepBudget, trace);
      ++execs;
      return trace;
    };
  }
};

// Min distance from every block to the nearest crash block, by
// Floyd-Warshall over the intended edges. UINT32_MAX marks unreachable.
inline std::vector<uint32_t> oracle_distances(const RandomGraph& g) {
  const uint32_t inf = UINT32_MAX;
  std::vector<std::vector<uint32_t>> d(static_cast<size_t>(g.n),
                                       std::vector<uint32_t>(static_cast<size_t>(g.n), inf));
  for (int i = 0; i < g.n; ++i) d[static_cast<size_t>(i)][static_cast<size_t>(i)] = 0;
  for (auto [u, v] : g.edges)
    d[static_cast<size_t>(u)][static_cast<size_t>(v)] =
        std::min<uint32_t>(d[static_cast<size_t>(u)][static_cast<size_t>(v)], 1);
  for (int k = 0; k < g.n; ++k)
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) {
        uint32_t a = d[static_cast<size_t>(i)][static_cast<size_t>(k)];
        uint32_t b = d[static_cast<size_t>(k)][static_cast<size_t>(j)];
        if (a != inf && b != inf && a + b < d[static_cast<size_t>(i)][static_cast<size_t>(j)])
          d[static_cast<size_t>(i)][static_cast<size_t>(j)] = a + b;
      }
  std::vector<uint32_t> out(static_cast<size_t>(g.n), inf);
  for (int i = 0; i < g.n; ++i)
    for (int c : g.crash_blocks)
      out[static_cast<size_t>(i)] =
          std::min(out[static_cast<size_t>(i)], d[static_cast<size_t>(i)][static_cast<size_t>(c)]);
  return out;
}

}  // namespace testutil

#endif
