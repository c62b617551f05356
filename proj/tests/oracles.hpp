#pragma once

// Brute-force reference implementations used only by tests. Everything here
// is deliberately independent of the library's algorithmic paths: subsets are
// enumerated as bitmasks, searches are plain recursion, no shared helpers.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treeweave/graph.hpp"
#include "treeweave/path_weaver.hpp"
#include "treeweave/tree.hpp"

namespace tw::oracle {

// Exact (n,d)-expander decision by full enumeration; n <= 20.
bool expander_exhaustive(const Graph& g, double d);

// Is there an x,y-path of exactly k edges with all interiors inside `interior`?
bool exact_path_exists(const Graph& g, int x, int y, int k, uint32_t interior_mask);

// Can all requests be routed vertex-disjointly with exact lengths, interiors
// inside `interior_mask`? Small n only.
bool disjoint_routing_exists(const Graph& g, const std::vector<PathRequest>& reqs,
                             uint32_t interior_mask);

// Directed variant with an orientation list per request.
bool oriented_path_exists(const DiGraph& g, int x, int y, const std::vector<int8_t>& orient,
                          uint32_t interior_mask);

// Maximum number of vertex-disjoint bare paths of length exactly k in a tree
// (exponential; small trees only).
int max_bare_path_packing(const TreeShape& t, int k);

// AHU-style canonical string of an unrooted tree given as an adjacency over
// the present vertices; isomorphism-invariant.
std::string canonical_tree_code(const std::vector<std::vector<int>>& adj,
                                const std::vector<int>& vertices);
std::string canonical_tree_code(const TreeShape& t);

// Generalized star-matching feasibility by recursive assignment; small sizes.
bool star_matching_feasible(const std::vector<std::vector<int>>& candidates,
                            const std::vector<int>& demand, int n_right);

// Does the host contain an edge-preserving injection of the whole forest?
// Exhaustive over placements; very small instances only.
bool forest_embeds(const Graph& host, const std::vector<std::vector<int>>& forest_adj,
                   const std::vector<int>& vertices);

// Exact cover check: can V(G) be partitioned into |pairs| paths of length
// l-1 with the given endpoints? Small n.
bool path_cover_exists(const Graph& g, const std::vector<std::pair<int, int>>& pairs, int l);

}  // namespace tw::oracle
