#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "treeweave/graph.hpp"

namespace tw {

// Endpoint pair with an exact length; orientations (one per edge, +1 forward
// along the path, -1 reversed) turn it into a directed request.
struct PathRequest {
  int x = -1, y = -1;
  int k = 1;
  std::vector<int8_t> orientations;
};

struct ExactPath {
  std::vector<int> vertices;  // v0..vk
  int length() const { return static_cast<int>(vertices.size()) - 1; }
  int front() const { return vertices.front(); }
  int back() const { return vertices.back(); }
};

bool validate_path(const Graph& g, const ExactPath& p);
bool validate_path_directed(const DiGraph& g, const ExactPath& p,
                            const std::vector<int8_t>& orientations);

// Per-stage snapshot handed to the audit callback.
struct StageSnapshot {
  int alpha = 0;
  int m = 0;
  int d0 = 0;
  std::vector<int> surviving;                 // request indices
  std::vector<VertexSet> s_sets, t_sets;      // aligned with surviving
  std::vector<ExactPath> done;                // completed so far, request order gaps allowed
};

struct WeaveConfig {
  int d0 = 0;              // matching degree per stage; 0 = auto (2 at desk scale)
  int stages = 0;          // 0 = auto
  double d_main = 0.0;     // m = |W| / (2 d_main); 0 = auto (8 * d0)
  int max_retries = 8;
  long long search_budget = 200'000;   // DFS expansions per exact-length search
  long long stage0_budget = 0;         // 0 = same as search_budget
  int min_len = 1, max_len = 0;        // request length window; 0 = |W|
  bool audit = true;                   // assert stage invariants
  long long split_verify_budget = 0;   // sampled verification inside split_target
  double core_d = 0.0;                 // expansion factor for the carved cores; 0 = auto
  std::function<void(const StageSnapshot&)> on_stage;
};

// Lemma-style "one path among many pairs": carve expanding cores out of two
// halves of U, grow a d-ary tree plus handle from some suitable request's
// endpoints, join the last levels through a common neighbor. Falls back to a
// budgeted DFS when the tree arithmetic is infeasible at this scale.
std::optional<std::pair<int, ExactPath>> find_one_exact_path(const Graph& g,
                                                             const std::vector<PathRequest>& requests,
                                                             const VertexSet& u,
                                                             const WeaveConfig& cfg, RngSeed seed);

// Connect every request with pairwise disjoint exact-length paths, interiors
// in W, via the stage escalation: greedy through U, then repeatedly expand the
// surviving end-sets into a fresh part by a d0-matching and retry with
// adjusted lengths. Throws StageStalled when survivors stop shrinking.
std::vector<ExactPath> connect_pairs_exact(const Graph& g, const std::vector<PathRequest>& requests,
                                           const VertexSet& w, const WeaveConfig& cfg, RngSeed seed);

std::vector<ExactPath> connect_pairs_exact_directed(const DiGraph& g,
                                                    const std::vector<PathRequest>& requests,
                                                    const VertexSet& w, const WeaveConfig& cfg,
                                                    RngSeed seed);

// Budgeted randomized DFS for one exact-length path with interiors in avail.
// Exposed for reuse by the absorber and cover machinery.
std::optional<std::vector<int>> find_path_exact(const Graph& g, int x, int y, int k,
                                                const VertexSet& avail, Rng& rng, long long budget);
std::optional<std::vector<int>> find_path_exact_directed(const DiGraph& g, int x, int y,
                                                         const std::vector<int8_t>& orientations,
                                                         const VertexSet& avail, Rng& rng,
                                                         long long budget);

}  // namespace tw
