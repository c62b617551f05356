#pragma once

#include <vector>

#include "treeweave/absorber.hpp"
#include "treeweave/graph.hpp"
#include "treeweave/path_weaver.hpp"

namespace tw {

struct CoverConfig {
  int sigma_b = 4;        // endgame segment length (>= 4; larger values route
                          // detour legs through the flexible set)
  int sigma_a = 30;       // target length for the other chain segments
  int stragglers = 0;     // 0 = auto from the pair count
  int small_n = 16;       // exhaustive backtracking below this size
  int max_retries = 6;
  StructureConfig structure;
  WeaveConfig weave;
  bool verify_expansion = false;  // sampled host check before working
  long long verify_budget = 300;
};

// Cover V(G) by n/l disjoint x_i,y_i-paths of length l-1, one per pair:
// an absorbing structure over the first 3r pairs provides the flexibility,
// the rest are routed as exact chains whose last segments may fall into the
// endgame and get rescued through the flexible set.
std::vector<ExactPath> cover_with_paths(const Graph& g, const std::vector<std::pair<int, int>>& pairs,
                                        int l, const CoverConfig& cfg, RngSeed seed);

struct DirectedCoverConfig {
  int sigma_b = 4;
  int sigma_a = 30;
  int stragglers = 0;
  int small_n = 14;
  int max_retries = 6;
  DirectedStructureConfig structure;
  WeaveConfig weave;
  bool verify_expansion = false;
  long long verify_budget = 300;
};

// Directed variant: every path runs x_i -> y_i with forward arcs throughout;
// absorbers are built from reversible gadgets.
std::vector<ExactPath> cover_with_paths_directed(const DiGraph& g,
                                                 const std::vector<std::pair<int, int>>& pairs,
                                                 int l, const DirectedCoverConfig& cfg, RngSeed seed);

}  // namespace tw
