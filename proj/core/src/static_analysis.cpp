#include "conff/static_analysis.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace conff {

namespace {

void terminator_targets(const Terminator& t, std::vector<int32_t>& out) {
  out.clear();
  switch (t.kind) {
    case TermKind::Jump:
      out.push_back(t.jump_target);
      break;
    case TermKind::CondBranch:
      out.push_back(t.target_true);
      out.push_back(t.target_false);
      break;
    case TermKind::Switch:
      for (const SwitchCase& c : t.cases) out.push_back(c.target);
      out.push_back(t.default_target);
      break;
    case TermKind::Return:
      break;
  }
}

// Dominator sets of one function's intra-function CFG, as bitsets over the
// function's local block positions. Unreachable blocks keep empty sets.
struct FunctionDoms {
  std::vector<int32_t> local;              // global block -> local position (-1 outside)
  std::vector<std::vector<uint64_t>> dom;  // local position -> bitset

  bool dominates(int32_t a_global, int32_t b_global) const {
    int32_t a = local[static_cast<size_t>(a_global)];
    int32_t b = local[static_cast<size_t>(b_global)];
    if (a < 0 || b < 0) return false;
    const std::vector<uint64_t>& bits = dom[static_cast<size_t>(b)];
    if (bits.empty()) return false;
    return (bits[static_cast<size_t>(a) / 64] >> (a % 64)) & 1;
  }
};

FunctionDoms compute_dominators(const TargetProgram& p, const Function& f) {
  FunctionDoms out;
  out.local.assign(p.blocks.size(), -1);
  const size_t n = f.blocks.size();
  for (size_t i = 0; i < n; ++i) out.local[static_cast<size_t>(f.blocks[i])] = static_cast<int32_t>(i);

  std::vector<std::vector<int32_t>> succ(n), pred(n);
  std::vector<int32_t> targets;
  for (size_t i = 0; i < n; ++i) {
    terminator_targets(p.blocks[static_cast<size_t>(f.blocks[i])].term, targets);
    for (int32_t tgt : targets) {
      int32_t lt = out.local[static_cast<size_t>(tgt)];
      if (lt < 0) continue;
      succ[i].push_back(lt);
      pred[static_cast<size_t>(lt)].push_back(static_cast<int32_t>(i));
    }
  }

  int32_t entry = out.local[static_cast<size_t>(f.entry_block)];
  std::vector<bool> reach(n, false);
  std::deque<int32_t> q{entry};
  reach[static_cast<size_t>(entry)] = true;
  while (!q.empty()) {
    int32_t v = q.front();
    q.pop_front();
    for (int32_t s : succ[static_cast<size_t>(v)])
      if (!reach[static_cast<size_t>(s)]) {
        reach[static_cast<size_t>(s)] = true;
        q.push_back(s);
      }
  }

  const size_t words = (n + 63) / 64;
  std::vector<uint64_t> all(words, ~0ull);
  if (n % 64) all.back() = (~0ull) >> (64 - n % 64);

  out.dom.assign(n, {});
  for (size_t i = 0; i < n; ++i) {
    if (!reach[i]) continue;
    if (static_cast<int32_t>(i) == entry) {
      out.dom[i].assign(words, 0);
      out.dom[i][i / 64] |= 1ull << (i % 64);
    } else {
      out.dom[i] = all;
    }
  }

  bool changed = true;
  std::vector<uint64_t> tmp(words);
  while (changed) {
    changed = false;
    for (size_t i = 0; i < n; ++i) {
      if (!reach[i] || static_cast<int32_t>(i) == entry) continue;
      tmp = all;
      for (int32_t pr : pred[i]) {
        if (!reach[static_cast<size_t>(pr)]) continue;
        const std::vector<uint64_t>& pd = out.dom[static_cast<size_t>(pr)];
        for (size_t w = 0; w < words; ++w) tmp[w] &= pd[w];
      }
      tmp[i / 64] |= 1ull << (i % 64);
      if (tmp != out.dom[i]) {
        out.dom[i] = tmp;
        changed = true;
      }
    }
  }
  return out;
}

}  // namespace

StaticGraph build_graph(const TargetProgram& p, const std::string& target_location) {
  StaticGraph g;
  g.target_location = target_location;
  const size_t n = p.blocks.size();
  g.succ.assign(n, {});
  g.pred.assign(n, {});

  auto add_edge = [&](int32_t from, int32_t to) {
    g.succ[static_cast<size_t>(from)].push_back(to);
    g.pred[static_cast<size_t>(to)].push_back(from);
  };

  // Returning blocks per function, for return edges.
  std::vector<std::vector<int32_t>> returns(p.functions.size());
  for (size_t bi = 0; bi < n; ++bi)
    if (p.blocks[bi].term.kind == TermKind::Return)
      returns[static_cast<size_t>(p.blocks[bi].function)].push_back(static_cast<int32_t>(bi));

  std::vector<int32_t> targets;
  for (size_t bi = 0; bi < n; ++bi) {
    const Block& b = p.blocks[bi];
    terminator_targets(b.term, targets);
    for (int32_t t : targets) add_edge(static_cast<int32_t>(bi), t);
    for (const Instr& ins : b.body) {
      if (ins.kind == InstrKind::Call) {
        const Function& callee = p.functions[static_cast<size_t>(ins.callee)];
        add_edge(static_cast<int32_t>(bi), callee.entry_block);
        for (int32_t r : returns[static_cast<size_t>(ins.callee)]) add_edge(r, static_cast<int32_t>(bi));
      }
      if (ins.kind == InstrKind::Crash && ins.crash_location == target_location)
        g.target_blocks.push_back(static_cast<int32_t>(bi));
    }
  }

  // The same block pair can be linked twice (e.g. two calls); dedupe so BFS
  // and DOT output stay clean.
  for (auto* lists : {&g.succ, &g.pred})
    for (auto& v : *lists) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }

  if (g.target_blocks.empty())
    throw SetupError("target location '" + target_location + "' matches no crash in the program");
  return g;
}

DistanceMap assign_distances(const TargetProgram& p, const StaticGraph& g) {
  DistanceMap dm;
  dm.dist.assign(p.blocks.size(), kUnreachable);
  std::deque<int32_t> q;
  for (int32_t t : g.target_blocks) {
    dm.dist[static_cast<size_t>(t)] = 0;
    q.push_back(t);
  }
  while (!q.empty()) {
    int32_t v = q.front();
    q.pop_front();
    uint32_t d = dm.dist[static_cast<size_t>(v)];
    for (int32_t pr : g.pred[static_cast<size_t>(v)]) {
      if (dm.dist[static_cast<size_t>(pr)] != kUnreachable) continue;
      dm.dist[static_cast<size_t>(pr)] = d + 1;
      q.push_back(pr);
    }
  }
  return dm;
}

std::vector<bool> mark_invalid(const TargetProgram& p) {
  std::vector<bool> invalid(p.sites.size(), false);
  for (const Function& f : p.functions) {
    FunctionDoms doms = compute_dominators(p, f);
    for (int32_t bi : f.blocks) {
      const Terminator& t = p.blocks[static_cast<size_t>(bi)].term;
      if (t.kind != TermKind::CondBranch) continue;
      if (doms.dominates(t.target_true, bi) || doms.dominates(t.target_false, bi))
        invalid[static_cast<size_t>(t.site)] = true;
    }
  }
  return invalid;
}

std::vector<SiteInfo> site_distances(const TargetProgram& p, const DistanceMap& dm) {
  std::vector<bool> invalid = mark_invalid(p);

  // Calling blocks per function, in block order.
  std::vector<std::vector<int32_t>> callers(p.functions.size());
  for (size_t bi = 0; bi < p.blocks.size(); ++bi)
    for (const Instr& ins : p.blocks[bi].body)
      if (ins.kind == InstrKind::Call)
        callers[static_cast<size_t>(ins.callee)].push_back(static_cast<int32_t>(bi));

  std::vector<SiteInfo> out;
  for (size_t si = 0; si < p.sites.size(); ++si) {
    const Site& s = p.sites[si];
    SiteInfo own;
    own.site = static_cast<int32_t>(si);
    own.distance = dm.of(s.block);
    own.invalid = invalid[si];
    out.push_back(own);

    int32_t func = p.blocks[static_cast<size_t>(s.block)].function;
    for (int32_t cb : callers[static_cast<size_t>(func)]) {
      uint32_t d = dm.of(cb);
      if (d == kUnreachable) continue;
      SiteInfo inherited;
      inherited.site = static_cast<int32_t>(si);
      inherited.distance = d;
      inherited.invalid = invalid[si];
      inherited.via_call_block = cb;
      out.push_back(inherited);
    }
  }
  return out;
}

int32_t edge_successor_block(const TargetProgram& p, int32_t site, uint8_t edge) {
  const Site& s = p.sites[static_cast<size_t>(site)];
  const Terminator& t = p.blocks[static_cast<size_t>(s.block)].term;
  if (t.kind == TermKind::CondBranch) return edge == 0 ? t.target_true : t.target_false;
  if (t.kind == TermKind::Switch)
    return edge < t.cases.size() ? t.cases[edge].target : t.default_target;
  return -1;
}

uint32_t edge_successor_distance(const TargetProgram& p, const DistanceMap& dm, int32_t site,
                                 uint8_t edge) {
  return dm.of(edge_successor_block(p, site, edge));
}

std::string write_dot(const TargetProgram& p, const StaticGraph& g, const DistanceMap& dm) {
  std::ostringstream os;
  os << "digraph blocks {\n  node [shape=box];\n";
  std::vector<bool> is_target(p.blocks.size(), false);
  for (int32_t t : g.target_blocks) is_target[static_cast<size_t>(t)] = true;
  for (size_t bi = 0; bi < p.blocks.size(); ++bi) {
    os << "  \"" << p.blocks[bi].id << "\" [label=\"" << p.blocks[bi].id << "\\nd=";
    if (dm.dist[bi] == kUnreachable) os << "inf";
    else os << dm.dist[bi];
    os << '"';
    if (is_target[bi]) os << ", peripheries=2";
    os << "];\n";
  }
  for (size_t bi = 0; bi < p.blocks.size(); ++bi)
    for (int32_t t : g.succ[bi])
      os << "  \"" << p.blocks[bi].id << "\" -> \"" << p.blocks[static_cast<size_t>(t)].id << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace conff
