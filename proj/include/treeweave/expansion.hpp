#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treeweave/graph.hpp"

namespace tw {

enum class CheckMode { exhaustive, sampled };

struct ExpansionParams {
  double d = 1.0;
  std::optional<VertexSet> target;  // W; absent means the whole graph
};

// Violating set for condition 1 (just x) or pair for condition 2 (x and y).
struct ExpansionWitness {
  VertexSet x;
  std::optional<VertexSet> y;
};

struct ExpansionReport {
  bool holds = false;
  CheckMode mode = CheckMode::sampled;
  std::optional<ExpansionWitness> witness;
  long long sets_checked = 0;

  std::string to_text() const;  // key: value lines
};

struct CheckConfig {
  long long exhaustive_cap = 10'000'000;  // max sets exhaustive mode may enumerate
  int sweep_limit = 64;   // sampled mode sweeps all sets of size <= 3 when n <= this
  int ball_radius = 2;    // BFS-ball candidate seeds
};

// (n,d)-expander check: condition 1 over all X with 1 <= |X| < ceil(n/2d),
// condition 2 over disjoint X, Y of size exactly ceil(n/2d). Sampled mode
// reports holds=true only as "no violation found".
ExpansionReport check_expander(const Graph& g, double d, CheckMode mode, long long budget,
                               RngSeed seed, const CheckConfig& cfg = {});

// "d-expands into W": neighborhoods measured inside W, set sizes from |W|.
ExpansionReport check_expands_into(const Graph& g, const ExpansionParams& params, CheckMode mode,
                                   long long budget, RngSeed seed, const CheckConfig& cfg = {});

// Directed sampled check: both |N+(X, W)| and |N-(X, W)| must expand, and
// large disjoint sets must be joined by an arc.
ExpansionReport check_expands_into_directed(const DiGraph& g, const ExpansionParams& params,
                                            long long budget, RngSeed seed,
                                            const CheckConfig& cfg = {});

struct SplitConfig {
  int max_retries = 16;
  long long verify_budget = 200;  // sampled budget per part; 0 skips verification
  double d_floor = 0.0;           // required minimum for each derived d_i
  bool enforce_k_cap = true;      // k <= log n per the partition lemma
};

// Partition W into parts of the requested sizes so that the graph
// (size_i/5|W|)d-expands into each part; random partition, verify, resample.
std::vector<VertexSet> split_target(const Graph& g, const VertexSet& w, const std::vector<int>& sizes,
                                    double d, RngSeed seed, const SplitConfig& cfg = {});

// Directed counterpart used by the directed cover machinery.
std::vector<VertexSet> split_target_directed(const DiGraph& g, const VertexSet& w,
                                             const std::vector<int>& sizes, double d, RngSeed seed,
                                             const SplitConfig& cfg = {});

// Fraction of G(n, min(1, 7 d log n / n)) samples passing the sampled
// expander check.
double verify_random_expansion(int n, double d, int trials, RngSeed seed,
                               long long budget = 2000);
double verify_random_expansion_at(int n, double d, double p, int trials, RngSeed seed,
                                  long long budget = 2000);

}  // namespace tw
