#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>

namespace tw::oracle {

namespace {

int popcount(uint32_t x) { return std::popcount(x); }

std::vector<int> mask_to_list(uint32_t m) {
  std::vector<int> out;
  for (int v = 0; v < 32; ++v) {
    if (m >> v & 1) out.push_back(v);
  }
  return out;
}

}  // namespace

bool expander_exhaustive(const Graph& g, double d) {
  int n = g.size();
  int cut = static_cast<int>(std::ceil(n / (2.0 * d)));
  std::vector<uint32_t> nbr(n, 0);
  for (int v = 0; v < n; ++v) {
    for (int u : g.neighbors(v)) nbr[v] |= uint32_t{1} << u;
  }
  uint32_t all = n == 32 ? ~uint32_t{0} : (uint32_t{1} << n) - 1;
  for (uint32_t x = 1; x <= all; ++x) {
    int sz = popcount(x);
    if (sz >= 1 && sz < cut) {
      uint32_t nx = 0;
      for (int v = 0; v < n; ++v) {
        if (x >> v & 1) nx |= nbr[v];
      }
      nx &= ~x;
      if (static_cast<double>(popcount(nx)) < d * sz - 1e-12) return false;
    }
  }
  if (2 * cut <= n) {
    for (uint32_t x = 1; x <= all; ++x) {
      if (popcount(x) != cut) continue;
      uint32_t rest = all & ~x;
      for (uint32_t y = (x - 1) & rest;; y = (y - 1) & rest) {
        if (popcount(y) == cut && y < x) {
          bool any = false;
          for (int v = 0; v < n && !any; ++v) {
            if ((x >> v & 1) && (nbr[v] & y)) any = true;
          }
          if (!any) return false;
        }
        if (y == 0) break;
      }
    }
  }
  return true;
}

bool exact_path_exists(const Graph& g, int x, int y, int k, uint32_t interior_mask) {
  std::function<bool(int, int, uint32_t)> rec = [&](int v, int rem, uint32_t used) -> bool {
    if (rem == 1) return g.has_edge(v, y);
    for (int u : g.neighbors(v)) {
      if (u == y || u >= 32) continue;
      if (!(interior_mask >> u & 1) || (used >> u & 1)) continue;
      if (rec(u, rem - 1, used | uint32_t{1} << u)) return true;
    }
    return false;
  };
  if (k < 1 || x == y) return false;
  return rec(x, k, 0);
}

bool oriented_path_exists(const DiGraph& g, int x, int y, const std::vector<int8_t>& orient,
                          uint32_t interior_mask) {
  int k = static_cast<int>(orient.size());
  std::function<bool(int, int, uint32_t)> rec = [&](int v, int pos, uint32_t used) -> bool {
    if (pos == k - 1) return orient[pos] > 0 ? g.has_arc(v, y) : g.has_arc(y, v);
    const auto& nbs = orient[pos] > 0 ? g.out_neighbors(v) : g.in_neighbors(v);
    for (int u : nbs) {
      if (u == y || u >= 32) continue;
      if (!(interior_mask >> u & 1) || (used >> u & 1)) continue;
      if (rec(u, pos + 1, used | uint32_t{1} << u)) return true;
    }
    return false;
  };
  if (k < 1 || x == y) return false;
  return rec(x, 0, 0);
}

bool disjoint_routing_exists(const Graph& g, const std::vector<PathRequest>& reqs,
                             uint32_t interior_mask) {
  std::function<bool(size_t, uint32_t)> rec = [&](size_t at, uint32_t avail) -> bool {
    if (at == reqs.size()) return true;
    const auto& req = reqs[at];
    // enumerate every exact-length path for this request, recurse on the rest
    std::function<bool(int, int, uint32_t)> walk = [&](int v, int rem, uint32_t used) -> bool {
      if (rem == 1) {
        if (!g.has_edge(v, req.y)) return false;
        return rec(at + 1, avail & ~used);
      }
      for (int u : g.neighbors(v)) {
        if (u == req.y || u >= 32) continue;
        if (!(avail >> u & 1) || (used >> u & 1)) continue;
        if (walk(u, rem - 1, used | uint32_t{1} << u)) return true;
      }
      return false;
    };
    return walk(req.x, req.k, 0);
  };
  return rec(0, interior_mask);
}

int max_bare_path_packing(const TreeShape& t, int k) {
  int n = t.size();
  // collect every bare path of length k (vertex sets as masks)
  std::vector<uint32_t> options;
  std::vector<std::vector<int>> adj(n);
  for (auto [p, c] : t.edges()) {
    adj[p].push_back(c);
    adj[c].push_back(p);
  }
  std::function<void(int, int, std::vector<int>&)> walk = [&](int v, int prev, std::vector<int>& acc) {
    acc.push_back(v);
    if (static_cast<int>(acc.size()) == k + 1) {
      bool bare = true;
      for (size_t i = 1; i + 1 < acc.size(); ++i) {
        if (t.degree(acc[i]) != 2) bare = false;
      }
      if (bare && acc.front() < acc.back()) {
        uint32_t m = 0;
        for (int u : acc) m |= uint32_t{1} << u;
        options.push_back(m);
      }
      acc.pop_back();
      return;
    }
    for (int u : adj[v]) {
      if (u != prev) walk(u, v, acc);
    }
    acc.pop_back();
  };
  for (int v = 0; v < n; ++v) {
    std::vector<int> acc;
    walk(v, -1, acc);
  }
  int best = 0;
  std::function<void(size_t, uint32_t, int)> pick = [&](size_t at, uint32_t used, int got) {
    best = std::max(best, got);
    if (at == options.size()) return;
    if (got + static_cast<int>(options.size() - at) <= best) return;
    pick(at + 1, used, got);
    if (!(options[at] & used)) pick(at + 1, used | options[at], got + 1);
  };
  pick(0, 0, 0);
  return best;
}

namespace {

std::string ahu_code(int v, int parent, const std::vector<std::vector<int>>& adj) {
  std::vector<std::string> subs;
  for (int u : adj[v]) {
    if (u != parent) subs.push_back(ahu_code(u, v, adj));
  }
  std::sort(subs.begin(), subs.end());
  std::string out = "(";
  for (const auto& s : subs) out += s;
  out += ")";
  return out;
}

}  // namespace

std::string canonical_tree_code(const std::vector<std::vector<int>>& adj,
                                const std::vector<int>& vertices) {
  if (vertices.empty()) return "";
  // centroid-rooted canonical form; try both centroids when there are two
  int n = static_cast<int>(vertices.size());
  std::map<int, int> sub;
  std::vector<int> centroids;
  std::function<int(int, int)> size_of = [&](int v, int parent) -> int {
    int s = 1;
    for (int u : adj[v]) {
      if (u != parent) s += size_of(u, v);
    }
    sub[v] = s;
    return s;
  };
  size_of(vertices[0], -1);
  std::function<void(int, int)> find = [&](int v, int parent) {
    int worst = n - sub[v];
    for (int u : adj[v]) {
      if (u != parent) {
        worst = std::max(worst, sub[u]);
        find(u, v);
      }
    }
    if (worst <= n / 2) centroids.push_back(v);
  };
  find(vertices[0], -1);
  std::string best;
  for (int c : centroids) {
    std::string code = ahu_code(c, -1, adj);
    if (best.empty() || code < best) best = code;
  }
  return best;
}

std::string canonical_tree_code(const TreeShape& t) {
  std::vector<std::vector<int>> adj(t.size());
  for (auto [p, c] : t.edges()) {
    adj[p].push_back(c);
    adj[c].push_back(p);
  }
  std::vector<int> verts(t.size());
  for (int i = 0; i < t.size(); ++i) verts[i] = i;
  return canonical_tree_code(adj, verts);
}

bool star_matching_feasible(const std::vector<std::vector<int>>& candidates,
                            const std::vector<int>& demand, int n_right) {
  std::vector<char> taken(n_right, 0);
  std::function<bool(size_t, int)> rec = [&](size_t who, int left) -> bool {
    if (who == candidates.size()) return true;
    if (left == 0) return rec(who + 1, who + 1 == candidates.size() ? 0 : demand[who + 1]);
    // choose candidates in order; standard exponential assignment search
    for (int r : candidates[who]) {
      if (taken[r]) continue;
      taken[r] = 1;
      if (rec(who, left - 1)) return true;
      taken[r] = 0;
    }
    return false;
  };
  if (candidates.empty()) return true;
  return rec(0, demand[0]);
}

bool forest_embeds(const Graph& host, const std::vector<std::vector<int>>& forest_adj,
                   const std::vector<int>& vertices) {
  std::vector<int> image(forest_adj.size(), -1);
  std::vector<char> used(host.size(), 0);
  std::function<bool(size_t)> rec = [&](size_t at) -> bool {
    if (at == vertices.size()) return true;
    int gv = vertices[at];
    for (int hv = 0; hv < host.size(); ++hv) {
      if (used[hv]) continue;
      bool ok = true;
      for (int gu : forest_adj[gv]) {
        if (image[gu] >= 0 && !host.has_edge(hv, image[gu])) ok = false;
      }
      if (!ok) continue;
      image[gv] = hv;
      used[hv] = 1;
      if (rec(at + 1)) return true;
      image[gv] = -1;
      used[hv] = 0;
    }
    return false;
  };
  return rec(0);
}

bool path_cover_exists(const Graph& g, const std::vector<std::pair<int, int>>& pairs, int l) {
  int n = g.size();
  uint32_t endpoints = 0;
  for (auto [x, y] : pairs) endpoints |= (uint32_t{1} << x) | (uint32_t{1} << y);
  uint32_t all = n == 32 ? ~uint32_t{0} : (uint32_t{1} << n) - 1;
  std::function<bool(size_t, uint32_t)> rec = [&](size_t at, uint32_t free) -> bool {
    if (at == pairs.size()) return free == 0;
    auto [x, y] = pairs[at];
    std::function<bool(int, int, uint32_t)> walk = [&](int v, int rem, uint32_t used) -> bool {
      if (rem == 1) {
        if (!g.has_edge(v, y)) return false;
        return rec(at + 1, free & ~used);
      }
      for (int u : g.neighbors(v)) {
        if (u == y) continue;
        if (!(free >> u & 1) || (used >> u & 1)) continue;
        if (walk(u, rem - 1, used | uint32_t{1} << u)) return true;
      }
      return false;
    };
    return walk(x, l - 1, 0);
  };
  return rec(0, all & ~endpoints);
}

}  // namespace tw::oracle
