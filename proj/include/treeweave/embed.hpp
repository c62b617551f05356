#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "treeweave/graph.hpp"
#include "treeweave/tree.hpp"

namespace tw {

// Partial injection guest -> host with edge preservation tracked by callers.
struct Embedding {
  std::vector<int> map;  // guest id -> host id, -1 when unmapped
  VertexSet used;        // image in the host

  Embedding() = default;
  Embedding(int guest_n, int host_n) : map(guest_n, -1), used(host_n) {}

  bool mapped(int g) const { return map[g] >= 0; }
  void place(int g, int h) {
    map[g] = h;
    used.insert(h);
  }
  void unplace(int g) {
    used.erase(map[g]);
    map[g] = -1;
  }
};

struct EmbedConfig {
  int max_retries = 20;
  long long backtrack_steps = 0;  // 0: defaults to 50 * |F|
  bool verify = false;            // sampled expansion check of the host before work
  long long verify_budget = 200;
};

// Edge-preserving injection of the forest into G[allowed]. BFS-order greedy
// placement choosing the parent-image neighbor with the highest residual
// degree into the still-free allowed set, bounded backtracking, then full
// restart on a fresh seed. Throws EmbedFailed after the retry budget.
Embedding embed_forest(const Graph& g, const Forest& f, const VertexSet& allowed,
                       const EmbedConfig& cfg, RngSeed seed);
Embedding embed_forest(const Graph& g, const TreeShape& t, const VertexSet& allowed,
                       const EmbedConfig& cfg, RngSeed seed);

// Single-tree greedy embed with the root pinned to a fixed host vertex.
// Returns nothing instead of throwing; used as a building block by the path
// construction machinery.
std::optional<Embedding> embed_tree_at(const Graph& g, const TreeShape& t, int root_image,
                                       const VertexSet& allowed, long long backtrack_budget);

// Oriented guest tree: arc_to_child[v] tells whether the tree edge at v points
// parent -> v (true) or v -> parent (false).
struct OrientedTree {
  TreeShape shape;
  std::vector<bool> arc_to_child;
};

// Embedding with the root pinned to root_image and every guest arc mapped to a
// correctly oriented host arc.
Embedding embed_rooted_directed(const DiGraph& h, const OrientedTree& t, int root_image,
                                const EmbedConfig& cfg, RngSeed seed);

struct StarDemand {
  std::vector<int> centers;
  std::vector<int> demand;  // 0 < d_i
  VertexSet pool;
};

// Vertex-disjoint stars: center i receives demand[i] pool vertices, each
// adjacent to it in g. Throws MatchingInfeasible with a deficient center set.
std::vector<std::vector<int>> attach_stars(const Graph& g, const StarDemand& demand, RngSeed seed);

// Independent validity check used by tests and the pipeline: totality over
// the guest, injectivity, edge preservation.
struct EmbeddingReport {
  bool valid = false;
  std::vector<std::string> problems;
};
EmbeddingReport verify_embedding(const Graph& g, const TreeShape& t, const Embedding& phi);
EmbeddingReport verify_embedding_directed(const DiGraph& g, const OrientedTree& t, const Embedding& phi);

// Serialization: lines "guest host".
void write_embedding(std::ostream& os, const Embedding& e);
Embedding read_embedding(std::istream& is, int guest_n, int host_n);

}  // namespace tw
