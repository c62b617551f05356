#include "treeweave/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

#include "treeweave/errors.hpp"

namespace tw {

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n), adj_(n) {
  if (n < 0) throw InvalidArgument("Graph: negative vertex count");
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) throw InvalidArgument("Graph: edge endpoint out of range");
    if (u == v) throw InvalidArgument("Graph: self-loop");
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  for (int v = 0; v < n; ++v) {
    auto& a = adj_[v];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    edge_count_ += static_cast<long long>(a.size());
  }
  edge_count_ /= 2;
  if (n <= kDenseRowLimit) {
    rows_.assign(n, VertexSet(n));
    for (int v = 0; v < n; ++v) {
      for (int u : adj_[v]) rows_[v].insert(u);
    }
  }
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_) return false;
  if (!rows_.empty()) return rows_[u].contains(v);
  const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
  int w = adj_[u].size() <= adj_[v].size() ? v : u;
  return std::binary_search(a.begin(), a.end(), w);
}

int Graph::degree_into(int v, const VertexSet& a) const {
  if (!rows_.empty()) return rows_[v].intersection_count(a);
  int c = 0;
  for (int u : adj_[v]) c += a.contains(u);
  return c;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count_);
  for (int v = 0; v < n_; ++v) {
    for (int u : adj_[v]) {
      if (v < u) out.emplace_back(v, u);
    }
  }
  return out;
}

DiGraph::DiGraph(int n, const std::vector<std::pair<int, int>>& arcs) : n_(n), out_(n), in_(n) {
  if (n < 0) throw InvalidArgument("DiGraph: negative vertex count");
  for (auto [u, v] : arcs) {
    if (u < 0 || u >= n || v < 0 || v >= n) throw InvalidArgument("DiGraph: arc endpoint out of range");
    if (u == v) throw InvalidArgument("DiGraph: self-loop");
    out_[u].push_back(v);
    in_[v].push_back(u);
  }
  for (int v = 0; v < n; ++v) {
    auto dedup = [](std::vector<int>& a) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    };
    dedup(out_[v]);
    dedup(in_[v]);
    arc_count_ += static_cast<long long>(out_[v].size());
  }
}

bool DiGraph::has_arc(int u, int v) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_) return false;
  return std::binary_search(out_[u].begin(), out_[u].end(), v);
}

std::vector<std::pair<int, int>> DiGraph::arcs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(arc_count_);
  for (int v = 0; v < n_; ++v) {
    for (int u : out_[v]) out.emplace_back(v, u);
  }
  return out;
}

namespace {

// Decode pair index k in [0, n(n-1)/2) to (u, v) with u < v, enumerating row
// by row: (0,1),(0,2),...,(0,n-1),(1,2),...
std::pair<int, int> decode_pair(uint64_t k, int n) {
  // Row u starts at offset u*n - u*(u+3)/2 ... solve by walking rows is O(n);
  // use the closed form with a float guess then fix up.
  double nn = static_cast<double>(n);
  double kk = static_cast<double>(k);
  double guess = nn - 0.5 - std::sqrt((nn - 0.5) * (nn - 0.5) - 2.0 * kk);
  int u = std::max(0, std::min(n - 2, static_cast<int>(guess)));
  auto row_start = [n](int r) {
    return static_cast<uint64_t>(r) * (2 * n - r - 1) / 2;
  };
  while (u > 0 && row_start(u) > k) --u;
  while (u + 1 <= n - 2 && row_start(u + 1) <= k) ++u;
  int v = static_cast<int>(k - row_start(u)) + u + 1;
  return {u, v};
}

}  // namespace

Graph gen_gnp(int n, double p, RngSeed seed) {
  if (n < 1) throw InvalidArgument("gen_gnp: n must be >= 1");
  if (p < 0.0 || p > 1.0) throw InvalidArgument("gen_gnp: p outside [0,1]");
  std::vector<std::pair<int, int>> edges;
  uint64_t total = static_cast<uint64_t>(n) * (n - 1) / 2;
  Rng rng(seed);
  if (p == 0.0 || total == 0) return Graph(n, edges);
  if (p == 1.0) {
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    }
    return Graph(n, edges);
  }
  if (p <= 0.25) {
    // geometric skipping across the flat pair index space
    edges.reserve(static_cast<size_t>(p * static_cast<double>(total) * 1.1) + 16);
    uint64_t idx = rng.geometric_skip(p);
    while (idx < total) {
      edges.push_back(decode_pair(idx, n));
      idx += 1 + rng.geometric_skip(p);
    }
  } else {
    edges.reserve(static_cast<size_t>(p * static_cast<double>(total)) + 16);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.bernoulli(p)) edges.emplace_back(u, v);
      }
    }
  }
  return Graph(n, edges);
}

DiGraph gen_gnp_directed(int n, double p, RngSeed seed) {
  if (n < 1) throw InvalidArgument("gen_gnp_directed: n must be >= 1");
  if (p < 0.0 || p > 1.0) throw InvalidArgument("gen_gnp_directed: p outside [0,1]");
  Rng rng(seed);
  std::vector<std::pair<int, int>> arcs;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u != v && rng.bernoulli(p)) arcs.emplace_back(u, v);
    }
  }
  return DiGraph(n, arcs);
}

DiGraph gen_tournament(int n, RngSeed seed) {
  if (n < 1) throw InvalidArgument("gen_tournament: n must be >= 1");
  Rng rng(seed);
  std::vector<std::pair<int, int>> arcs;
  arcs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.bernoulli(0.5)) {
        arcs.emplace_back(u, v);
      } else {
        arcs.emplace_back(v, u);
      }
    }
  }
  return DiGraph(n, arcs);
}

VertexSet neighborhood(const Graph& g, const VertexSet& s, const VertexSet& a) {
  VertexSet acc(g.size());
  if (g.has_rows()) {
    s.for_each([&](int v) { acc.or_word_block(g.row(v).words()); });
  } else {
    s.for_each([&](int v) {
      for (int u : g.neighbors(v)) acc.insert(u);
    });
  }
  acc -= s;
  acc &= a;
  return acc;
}

VertexSet neighborhood(const Graph& g, const VertexSet& s) {
  return neighborhood(g, s, VertexSet::full(g.size()));
}

VertexSet out_neighborhood(const DiGraph& g, const VertexSet& s, const VertexSet& a) {
  VertexSet acc(g.size());
  s.for_each([&](int v) {
    for (int u : g.out_neighbors(v)) acc.insert(u);
  });
  acc -= s;
  acc &= a;
  return acc;
}

VertexSet in_neighborhood(const DiGraph& g, const VertexSet& s, const VertexSet& a) {
  VertexSet acc(g.size());
  s.for_each([&](int v) {
    for (int u : g.in_neighbors(v)) acc.insert(u);
  });
  acc -= s;
  acc &= a;
  return acc;
}

long long edges_between(const Graph& g, const VertexSet& x, const VertexSet& y) {
  if (x.intersects(y)) throw InvalidArgument("edges_between: sets overlap");
  long long c = 0;
  x.for_each([&](int v) { c += g.degree_into(v, y); });
  return c;
}

InducedGraph induced(const Graph& g, const VertexSet& u) {
  std::vector<int> to_parent = u.to_vector();
  std::vector<int> to_new(g.size(), -1);
  for (size_t i = 0; i < to_parent.size(); ++i) to_new[to_parent[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> edges;
  for (size_t i = 0; i < to_parent.size(); ++i) {
    for (int w : g.neighbors(to_parent[i])) {
      if (to_new[w] > static_cast<int>(i)) edges.emplace_back(static_cast<int>(i), to_new[w]);
    }
  }
  return InducedGraph{Graph(static_cast<int>(to_parent.size()), edges), std::move(to_parent)};
}

void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.size() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& is) {
  long long n = 0, m = 0;
  if (!(is >> n >> m)) throw InvalidArgument("edge list: bad header");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  for (long long i = 0; i < m; ++i) {
    int u, v;
    if (!(is >> u >> v)) throw InvalidArgument("edge list: truncated");
    edges.emplace_back(u, v);
  }
  return Graph(static_cast<int>(n), edges);
}

void write_arc_list(std::ostream& os, const DiGraph& g) {
  os << g.size() << ' ' << g.arc_count() << '\n';
  for (auto [u, v] : g.arcs()) os << u << ' ' << v << '\n';
}

DiGraph read_arc_list(std::istream& is) {
  long long n = 0, m = 0;
  if (!(is >> n >> m)) throw InvalidArgument("arc list: bad header");
  std::vector<std::pair<int, int>> arcs;
  arcs.reserve(m);
  for (long long i = 0; i < m; ++i) {
    int u, v;
    if (!(is >> u >> v)) throw InvalidArgument("arc list: truncated");
    arcs.emplace_back(u, v);
  }
  return DiGraph(static_cast<int>(n), arcs);
}

std::vector<int> bfs_distances(const Graph& g, int src, const VertexSet& within) {
  std::vector<int> dist(g.size(), -1);
  dist[src] = 0;
  std::deque<int> q{src};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int u : g.neighbors(v)) {
      if (dist[u] < 0 && within.contains(u)) {
        dist[u] = dist[v] + 1;
        q.push_back(u);
      }
    }
  }
  return dist;
}

}  // namespace tw
