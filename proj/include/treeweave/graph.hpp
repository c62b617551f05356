#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "treeweave/rng.hpp"
#include "treeweave/vertex_set.hpp"

namespace tw {

// Undirected host graph over dense vertex ids [0, n). Immutable after
// construction. Adjacency is kept as sorted lists; for small universes a
// per-vertex bitset row is kept too, since the pipeline is dominated by
// neighborhood intersections.
class Graph {
 public:
  static constexpr int kDenseRowLimit = 4096;

  Graph() = default;
  Graph(int n, const std::vector<std::pair<int, int>>& edges);

  int size() const { return n_; }
  long long edge_count() const { return edge_count_; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  bool has_edge(int u, int v) const;
  bool has_rows() const { return !rows_.empty(); }
  const VertexSet& row(int v) const { return rows_[v]; }

  // Degree restricted to a set.
  int degree_into(int v, const VertexSet& a) const;

  std::vector<std::pair<int, int>> edges() const;

 private:
  int n_ = 0;
  long long edge_count_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<VertexSet> rows_;
};

// Directed host graph; u in out(v) iff v in in(u).
class DiGraph {
 public:
  DiGraph() = default;
  DiGraph(int n, const std::vector<std::pair<int, int>>& arcs);  // u -> v

  int size() const { return n_; }
  long long arc_count() const { return arc_count_; }
  const std::vector<int>& out_neighbors(int v) const { return out_[v]; }
  const std::vector<int>& in_neighbors(int v) const { return in_[v]; }
  int out_degree(int v) const { return static_cast<int>(out_[v].size()); }
  int in_degree(int v) const { return static_cast<int>(in_[v].size()); }
  bool has_arc(int u, int v) const;

  std::vector<std::pair<int, int>> arcs() const;

 private:
  int n_ = 0;
  long long arc_count_ = 0;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

// Seeded G(n,p); each unordered pair kept independently with probability p.
// Uses geometric skipping over the pair index space when p is small.
Graph gen_gnp(int n, double p, RngSeed seed);

// Directed analogue over ordered pairs, and a uniform random tournament.
DiGraph gen_gnp_directed(int n, double p, RngSeed seed);
DiGraph gen_tournament(int n, RngSeed seed);

// N(S, A) = (union of N(v) over v in S, minus S) intersected with A.
VertexSet neighborhood(const Graph& g, const VertexSet& s, const VertexSet& a);
VertexSet neighborhood(const Graph& g, const VertexSet& s);  // A = V(G)

VertexSet out_neighborhood(const DiGraph& g, const VertexSet& s, const VertexSet& a);
VertexSet in_neighborhood(const DiGraph& g, const VertexSet& s, const VertexSet& a);

// Number of edges with one end in X and the other in Y; X and Y must be disjoint.
long long edges_between(const Graph& g, const VertexSet& x, const VertexSet& y);

// G[U] with the id mapping back to the parent graph.
struct InducedGraph {
  Graph graph;
  std::vector<int> to_parent;  // new id -> old id
};
InducedGraph induced(const Graph& g, const VertexSet& u);

// Plain-text edge list: first line "n m", then m lines "u v".
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);
void write_arc_list(std::ostream& os, const DiGraph& g);
DiGraph read_arc_list(std::istream& is);

// BFS distances from src inside G[within]; -1 when unreachable. src need not
// be in `within` (it is treated as included).
std::vector<int> bfs_distances(const Graph& g, int src, const VertexSet& within);

}  // namespace tw
