#include "treeweave/tree.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <string>

#include "treeweave/errors.hpp"

namespace tw {

TreeShape::TreeShape(std::vector<int> parent) : n_(static_cast<int>(parent.size())), parent_(std::move(parent)) {
  if (n_ == 0) throw InvalidArgument("TreeShape: empty");
  if (parent_[0] != -1) throw InvalidArgument("TreeShape: vertex 0 must be the root");
  children_.assign(n_, {});
  for (int v = 1; v < n_; ++v) {
    if (parent_[v] < 0 || parent_[v] >= n_) throw InvalidArgument("TreeShape: bad parent pointer");
    children_[parent_[v]].push_back(v);
  }
  // reachability doubles as the acyclicity check
  int seen = 0;
  std::deque<int> q{0};
  std::vector<char> vis(n_, 0);
  vis[0] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    ++seen;
    for (int c : children_[v]) {
      if (vis[c]) throw InvalidArgument("TreeShape: cycle");
      vis[c] = 1;
      q.push_back(c);
    }
  }
  if (seen != n_) throw InvalidArgument("TreeShape: not connected");
  for (int v = 0; v < n_; ++v) max_degree_ = std::max(max_degree_, degree(v));
}

TreeShape TreeShape::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw InvalidArgument("TreeShape: n must be >= 1");
  if (static_cast<int>(edges.size()) != n - 1) throw InvalidArgument("TreeShape: need n-1 edges");
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n || u == v) throw InvalidArgument("TreeShape: bad edge");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> parent(n, -2);
  parent[0] = -1;
  std::deque<int> q{0};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int u : adj[v]) {
      if (parent[u] == -2) {
        parent[u] = v;
        q.push_back(u);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (parent[v] == -2) throw InvalidArgument("TreeShape: not connected");
  }
  return TreeShape(std::move(parent));
}

std::vector<int> TreeShape::bfs_order() const {
  std::vector<int> order;
  order.reserve(n_);
  std::deque<int> q{0};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    order.push_back(v);
    for (int c : children_[v]) q.push_back(c);
  }
  return order;
}

std::vector<std::pair<int, int>> TreeShape::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(n_ - 1);
  for (int v = 1; v < n_; ++v) out.emplace_back(parent_[v], v);
  return out;
}

TreeFamily tree_family_from_string(const std::string& name) {
  if (name == "uniform-attachment") return TreeFamily::uniform_attachment;
  if (name == "caterpillar") return TreeFamily::caterpillar;
  if (name == "binary") return TreeFamily::binary;
  if (name == "path") return TreeFamily::path;
  if (name == "broom") return TreeFamily::broom;
  throw InvalidArgument("unknown tree family: " + name);
}

const char* to_string(TreeFamily f) {
  switch (f) {
    case TreeFamily::uniform_attachment: return "uniform-attachment";
    case TreeFamily::caterpillar: return "caterpillar";
    case TreeFamily::binary: return "binary";
    case TreeFamily::path: return "path";
    case TreeFamily::broom: return "broom";
  }
  return "?";
}

TreeShape gen_random_tree(int n, int max_degree, TreeFamily family, RngSeed seed) {
  if (n < 1) throw InvalidArgument("gen_random_tree: n must be >= 1");
  if (n <= 2) {
    if (max_degree < 1 && n == 2) throw InvalidArgument("gen_random_tree: degree bound infeasible");
    std::vector<int> parent(n, -1);
    if (n == 2) parent[1] = 0;
    return TreeShape(std::move(parent));
  }
  if (max_degree < 2) throw InvalidArgument("gen_random_tree: need max_degree >= 2 for n > 2");
  Rng rng(seed);
  std::vector<int> parent(n, -1);
  switch (family) {
    case TreeFamily::path:
      for (int v = 1; v < n; ++v) parent[v] = v - 1;
      break;
    case TreeFamily::binary: {
      if (n >= 4 && max_degree < 3) throw InvalidArgument("gen_random_tree: binary needs max_degree >= 3");
      for (int v = 1; v < n; ++v) parent[v] = (v - 1) / 2;
      break;
    }
    case TreeFamily::broom: {
      // as many leaves at the head as the degree bound allows, rest is handle
      int head_leaves = std::min(n - 1, max_degree);
      if (head_leaves < n - 1) head_leaves = max_degree - 1;
      for (int v = 1; v <= head_leaves; ++v) parent[v] = 0;
      for (int v = head_leaves + 1; v < n; ++v) parent[v] = v == head_leaves + 1 ? 0 : v - 1;
      break;
    }
    case TreeFamily::caterpillar: {
      // spine long enough that the leg slots can hold everyone, legs attached
      // to random spine vertices with spare capacity
      int spine_len = std::min(n, std::max(2, (n + max_degree - 2) / (max_degree - 1)));
      std::vector<int> cap(n, 0);
      std::vector<int> open;
      for (int v = 1; v < spine_len; ++v) parent[v] = v - 1;
      cap[0] = max_degree - 1;
      for (int v = 1; v < spine_len; ++v) cap[v] = max_degree - 2;
      cap[spine_len - 1] = max_degree - 1;
      for (int v = 0; v < spine_len; ++v) {
        if (cap[v] > 0) open.push_back(v);
      }
      for (int v = spine_len; v < n; ++v) {
        int pick = static_cast<int>(rng.below(open.size()));
        int p = open[pick];
        parent[v] = p;
        if (--cap[p] == 0) {
          open[pick] = open.back();
          open.pop_back();
        }
      }
      break;
    }
    case TreeFamily::uniform_attachment: {
      // each vertex attaches to a uniform earlier vertex with spare capacity
      std::vector<int> load(n, 0);
      std::vector<int> open{0};
      for (int v = 1; v < n; ++v) {
        int pick = static_cast<int>(rng.below(open.size()));
        int p = open[pick];
        parent[v] = p;
        load[p] += 1;
        if (load[p] + (p == 0 ? 0 : 1) >= max_degree) {
          open[pick] = open.back();
          open.pop_back();
        }
        if (1 < max_degree) open.push_back(v);  // child slot budget: max_degree - 1
        load[v] = 0;
      }
      break;
    }
  }
  TreeShape t(std::move(parent));
  if (t.max_degree() > max_degree) throw InvalidArgument("gen_random_tree: degree bound infeasible for family");
  return t;
}

VertexSet leaves(const TreeShape& t) {
  if (t.size() < 2) throw InvalidArgument("leaves: need n >= 2");
  VertexSet out(t.size());
  for (int v = 0; v < t.size(); ++v) {
    if (t.degree(v) == 1) out.insert(v);
  }
  return out;
}

std::vector<BarePath> bare_paths(const TreeShape& t, int k) {
  if (k < 1) throw InvalidArgument("bare_paths: k must be >= 1");
  int n = t.size();
  // Maximal runs of degree-2 vertices, walked from their smallest-id entry
  // point; each run is cut into consecutive (k+1)-vertex segments. Segments
  // never take the run's bounding vertices, so paths from different runs are
  // disjoint by construction.
  std::vector<char> deg2(n, 0), used(n, 0);
  for (int v = 0; v < n; ++v) deg2[v] = t.degree(v) == 2;
  std::vector<BarePath> out;
  auto tree_neighbors = [&](int v) {
    std::vector<int> nb = t.children(v);
    if (t.parent(v) >= 0) nb.push_back(t.parent(v));
    std::sort(nb.begin(), nb.end());
    return nb;
  };
  for (int v = 0; v < n; ++v) {
    if (!deg2[v] || used[v]) continue;
    // walk to one end of the run of degree-2 vertices containing v
    int start = v, prev = -1;
    while (true) {
      bool moved = false;
      for (int u : tree_neighbors(start)) {
        if (u != prev && deg2[u]) {
          prev = start;
          start = u;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    // collect the run from this end
    std::vector<int> run;
    prev = -1;
    int cur = start;
    while (true) {
      run.push_back(cur);
      used[cur] = 1;
      int next = -1;
      for (int u : tree_neighbors(cur)) {
        if (u != prev && deg2[u] && !used[u]) {
          next = u;
          break;
        }
      }
      if (next < 0) break;
      prev = cur;
      cur = next;
    }
    // orient the run so segments start at its smaller-id end
    if (run.size() > 1 && run.back() < run.front()) std::reverse(run.begin(), run.end());
    for (size_t at = 0; at + k < run.size(); at += k + 1) {
      BarePath p;
      p.vertices.assign(run.begin() + at, run.begin() + at + k + 1);
      out.push_back(std::move(p));
    }
  }
  return out;
}

Classification classify(const TreeShape& t, int k) {
  if (t.size() <= 2 || k <= 2) throw InvalidArgument("classify: need n > 2 and k > 2");
  double bound = static_cast<double>(t.size()) / (4.0 * k);
  VertexSet ls = leaves(t);
  if (ls.count() >= bound) return Classification{Classification::leafy, ls, {}};
  auto paths = bare_paths(t, k);
  if (static_cast<double>(paths.size()) >= bound) {
    return Classification{Classification::pathy, VertexSet(t.size()), std::move(paths)};
  }
  throw DichotomyViolation("classify: neither enough leaves nor enough bare paths");
}

std::vector<std::vector<int>> Forest::components() const {
  std::vector<std::vector<int>> comps;
  std::vector<char> vis(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!present.contains(v) || vis[v]) continue;
    std::vector<int> comp;
    std::deque<int> q{v};
    vis[v] = 1;
    while (!q.empty()) {
      int w = q.front();
      q.pop_front();
      comp.push_back(w);
      for (int u : adj[w]) {
        if (!vis[u]) {
          vis[u] = 1;
          q.push_back(u);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

namespace {

Forest make_forest(const TreeShape& t, const VertexSet& removed) {
  Forest f;
  f.n = t.size();
  f.present = VertexSet::full(t.size());
  f.present -= removed;
  f.adj.assign(t.size(), {});
  for (auto [p, c] : t.edges()) {
    if (f.present.contains(p) && f.present.contains(c)) {
      f.adj[p].push_back(c);
      f.adj[c].push_back(p);
    }
  }
  return f;
}

}  // namespace

StripResult strip(const TreeShape& t, const VertexSet& leaf_subset) {
  VertexSet all_leaves = leaves(t);
  if (!leaf_subset.is_subset_of(all_leaves)) throw InvalidArgument("strip: removal set contains non-leaves");
  StripResult r;
  r.removed = leaf_subset;
  r.forest = make_forest(t, leaf_subset);
  std::vector<int> demand(t.size(), 0);
  leaf_subset.for_each([&](int v) {
    int nb = t.parent(v) >= 0 ? t.parent(v) : t.children(v).front();
    if (leaf_subset.contains(nb)) throw InvalidArgument("strip: both ends of an edge removed");
    demand[nb] += 1;
  });
  for (int v = 0; v < t.size(); ++v) {
    if (demand[v] > 0) r.leaf_demands.emplace_back(v, demand[v]);
  }
  return r;
}

StripResult strip(const TreeShape& t, const std::vector<BarePath>& path_list) {
  VertexSet removed(t.size());
  VertexSet touched(t.size());
  for (const auto& p : path_list) {
    if (p.length() < 2) throw InvalidArgument("strip: bare path too short to have an interior");
    for (int v : p.vertices) {
      if (touched.contains(v)) throw InvalidArgument("strip: bare paths overlap");
      touched.insert(v);
    }
    for (size_t i = 0; i + 1 < p.vertices.size(); ++i) {
      if (!t.has_edge(p.vertices[i], p.vertices[i + 1])) throw InvalidArgument("strip: not a tree path");
    }
    for (size_t i = 1; i + 1 < p.vertices.size(); ++i) {
      int v = p.vertices[i];
      if (t.degree(v) != 2) throw InvalidArgument("strip: path interior vertex has degree != 2");
      removed.insert(v);
    }
  }
  StripResult r;
  r.removed = removed;
  r.forest = make_forest(t, removed);
  for (const auto& p : path_list) {
    r.path_requests.push_back(PathRequestInTree{p.vertices.front(), p.vertices.back(), p.length()});
  }
  return r;
}

void write_tree(std::ostream& os, const TreeShape& t) {
  os << t.size() << '\n';
  for (auto [p, c] : t.edges()) os << p << ' ' << c << '\n';
}

TreeShape read_tree(std::istream& is) {
  int n = 0;
  if (!(is >> n)) throw InvalidArgument("tree file: bad header");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(std::max(0, n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    int p, c;
    if (!(is >> p >> c)) throw InvalidArgument("tree file: truncated");
    edges.emplace_back(p, c);
  }
  return TreeShape::from_edges(n, edges);
}

}  // namespace tw
