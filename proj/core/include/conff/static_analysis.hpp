// Distance analysis over the block graph.
//
// The graph nodes are all blocks of the program. Edges are the terminator
// edges inside each function, plus a call edge from every block containing
// a call to the callee's entry block, and a return edge from every
// returning block of the callee back to the calling block.
//
// Target blocks are the blocks containing a Crash instruction whose
// location label equals the requested target location. Distances are hop
// counts of a breadth-first search on the reversed graph seeded with the
// target blocks, so dist(b) == 0 exactly for targets and kUnreachable for
// blocks with no path to any target.
//
// A conditional branch site is invalid when one of its outgoing edges is a
// back edge (edge whose target dominates its source in the intra-function
// CFG) - the bottom test of a structured loop. Invalid sites stay out of
// constraint scheduling.
//
// Every site gets one entry at its own block's distance; sites inside a
// callee get an additional entry at the distance of each finite-distance
// calling block, mirroring how a call site inherits its callee's checks.

#ifndef CONFF_STATIC_ANALYSIS_HPP
#define CONFF_STATIC_ANALYSIS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "conff/ir.hpp"

namespace conff {

inline constexpr uint32_t kUnreachable = UINT32_MAX;

struct StaticGraph {
  std::vector<std::vector<int32_t>> succ;  // indexed by block
  std::vector<std::vector<int32_t>> pred;
  std::vector<int32_t> target_blocks;
  std::string target_location;
};

struct DistanceMap {
  std::vector<uint32_t> dist;  // indexed by block; kUnreachable when no path

  uint32_t of(int32_t block) const {
    return block < 0 ? kUnreachable : dist[static_cast<size_t>(block)];
  }
  bool reachable(int32_t block) const { return of(block) != kUnreachable; }
};

struct SiteInfo {
  int32_t site = -1;
  uint32_t distance = kUnreachable;
  bool invalid = false;
  int32_t via_call_block = -1;  // -1: entry at the site's own block
};

class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws SetupError when no block carries a crash at target_location.
StaticGraph build_graph(const TargetProgram& p, const std::string& target_location);

DistanceMap assign_distances(const TargetProgram& p, const StaticGraph& g);

// Sites whose conditional branch has a back edge among its outgoing edges.
std::vector<bool> mark_invalid(const TargetProgram& p);

// All published site entries: own-block entries for every site, plus
// call-inherited entries, in deterministic order (site index, then origin).
std::vector<SiteInfo> site_distances(const TargetProgram& p, const DistanceMap& dm);

// Distance of the successor block behind the given edge of a site.
uint32_t edge_successor_distance(const TargetProgram& p, const DistanceMap& dm,
                                 int32_t site, uint8_t edge);
int32_t edge_successor_block(const TargetProgram& p, int32_t site, uint8_t edge);

// Distance-annotated DOT rendering of the block graph.
std::string write_dot(const TargetProgram& p, const StaticGraph& g, const DistanceMap& dm);

}  // namespace conff

#endif
