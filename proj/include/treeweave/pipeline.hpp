#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treeweave/cover.hpp"
#include "treeweave/embed.hpp"
#include "treeweave/graph.hpp"
#include "treeweave/tree.hpp"

namespace tw {

// Every tunable constant of the end-to-end pipeline. paper() fills in the
// literal formulas evaluated at n (only runnable at astronomical sizes);
// desk() picks the smallest settings at which the machinery is exercisable.
struct ScaleParams {
  bool strict_paper_mode = false;
  int delta = 3;                 // guest degree bound the constants assume
  double expander_d = 0.0;       // host expansion factor for splits (0 = auto)
  int bare_k = 0;                // bare-path length for classify/strip (0 = cover_l - 1)
  int cover_l = 32;              // exact-cover path vertex count
  int template_matchings = 2;    // random matchings in the flexibility template
  int absorbers_per_vertex = 0;  // 0 = 2 * template_matchings
  int absorber_k_paths = 1;      // internal paths per gadget
  int absorber_p_len = 2;        // length of each internal path
  int sigma_b = 4;               // endgame segment length
  int stragglers = 0;            // 0 = auto
  double leaf_removal_frac = 0.125;
  int min_leaf_removal = 1;      // floor applied when the scaled count rounds to 0
  int min_matching_centers = 1;  // floor for |M| in the leafy completion
  int max_retries = 6;
  long long search_budget = 200'000;
  long long split_verify_budget = 0;  // sampled expansion checks inside splits
  int d0 = 2;                         // stage matching degree
  int stages = 3;

  static ScaleParams desk(int delta = 3);
  static ScaleParams paper(int n, int delta);

  int effective_bare_k() const { return bare_k > 0 ? bare_k : cover_l - 1; }
  WeaveConfig weave() const;
  CoverConfig cover() const;

  std::string to_text() const;                       // key=value lines
  static ScaleParams from_text(std::istream& is);    // partial overrides over desk()
};

struct TrialRecord {
  uint64_t seed = 0;
  int n = 0;
  int delta = 0;
  double p = 0.0;
  std::string branch;      // "leafy" or "pathy"
  bool success = false;
  std::string fail_phase;  // empty on success
  double wall_ms = 0.0;
  std::vector<std::pair<std::string, double>> phase_ms;

  std::string to_text() const;
};

struct TrialResult {
  Embedding embedding;
  TrialRecord record;
  Graph host;  // the revealed graph the embedding was validated against
};

// Two-phase reveal pipeline: classify the guest, embed the stripped forest,
// then complete by star matching (leafy) or exact path cover (pathy). Never
// returns success without the validator passing.
TrialResult embed_spanning_tree(int n, double p, const TreeShape& t, const ScaleParams& params,
                                RngSeed seed);

struct ScanConfig {
  std::vector<int> ns;
  std::vector<double> ps;
  std::vector<TreeFamily> families;
  int delta = 3;
  int trials = 10;
  ScaleParams params;
  uint64_t seed = 1;
};

// Success-rate grid; one CSV row per (n, p, family) cell, flushed as it
// completes. Columns: n,p,family,delta,trials,successes,mean_ms,branch_counts.
void threshold_scan(const ScanConfig& cfg, std::ostream& csv);

ScanConfig read_scan_config(std::istream& is);

}  // namespace tw
