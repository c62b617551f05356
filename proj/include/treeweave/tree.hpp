#pragma once

#include <iosfwd>
#include <vector>

#include "treeweave/rng.hpp"
#include "treeweave/vertex_set.hpp"

namespace tw {

// Guest tree: rooted at vertex 0 by convention, parent[0] = -1.
class TreeShape {
 public:
  TreeShape() = default;
  explicit TreeShape(std::vector<int> parent);
  static TreeShape from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int size() const { return n_; }
  int parent(int v) const { return parent_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  int degree(int v) const {
    return static_cast<int>(children_[v].size()) + (parent_[v] >= 0 ? 1 : 0);
  }
  int max_degree() const { return max_degree_; }
  int root() const { return 0; }
  bool has_edge(int u, int v) const { return parent_[u] == v || parent_[v] == u; }

  std::vector<int> bfs_order() const;  // root first, parents before children
  std::vector<std::pair<int, int>> edges() const;  // (parent, child)

 private:
  int n_ = 0;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  int max_degree_ = 0;
};

enum class TreeFamily { uniform_attachment, caterpillar, binary, path, broom };

TreeFamily tree_family_from_string(const std::string& name);
const char* to_string(TreeFamily f);

// Random member of the (n, max_degree) tree class; family selects shape bias.
TreeShape gen_random_tree(int n, int max_degree, TreeFamily family, RngSeed seed);

VertexSet leaves(const TreeShape& t);

// Path in a tree whose interior vertices have degree exactly 2 in the tree.
struct BarePath {
  std::vector<int> vertices;  // v0..vk
  int length() const { return static_cast<int>(vertices.size()) - 1; }
};

// Maximal greedy collection of vertex-disjoint bare paths of length exactly k,
// cut from maximal degree-2 runs, smallest ids first.
std::vector<BarePath> bare_paths(const TreeShape& t, int k);

struct Classification {
  enum Kind { leafy, pathy } kind;
  VertexSet leaf_set;           // leafy
  std::vector<BarePath> paths;  // pathy
};

// Either >= n/4k leaves or >= n/4k disjoint bare paths of length k; throws
// DichotomyViolation if neither bound is met.
Classification classify(const TreeShape& t, int k);

// Remnant of a tree after removals, on the original id space.
struct Forest {
  int n = 0;
  VertexSet present;
  std::vector<std::vector<int>> adj;

  int vertex_count() const { return present.count(); }
  std::vector<std::vector<int>> components() const;  // each sorted, BFS order
};

struct PathRequestInTree {
  int end1, end2;
  int length;  // edges on the path to re-create between the two ends
};

struct StripResult {
  Forest forest;
  std::vector<std::pair<int, int>> leaf_demands;  // (surviving vertex, count)
  std::vector<PathRequestInTree> path_requests;
  VertexSet removed;
};

StripResult strip(const TreeShape& t, const VertexSet& leaf_subset);
StripResult strip(const TreeShape& t, const std::vector<BarePath>& path_list);

// Tree file format: first line "n", then n-1 lines "parent child".
void write_tree(std::ostream& os, const TreeShape& t);
TreeShape read_tree(std::istream& is);

}  // namespace tw
