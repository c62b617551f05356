#pragma once

#include <vector>

namespace tw {

// Generalized bipartite matching: left vertex i wants demand[i] distinct
// right vertices from its candidate list, all assignments disjoint (right
// capacity 1). On failure, `deficient` is a left-side set A with
// sum of demands over A exceeding |N(A)|.
struct GenMatchResult {
  bool ok = false;
  std::vector<std::vector<int>> assignment;  // per left: chosen right ids
  std::vector<int> deficient;
};

GenMatchResult generalized_matching(int n_right,
                                    const std::vector<std::vector<int>>& candidates,
                                    const std::vector<int>& demand);

}  // namespace tw
