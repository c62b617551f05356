#include "treeweave/embed.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "treeweave/errors.hpp"
#include "treeweave/expansion.hpp"
#include "treeweave/matching.hpp"

namespace tw {

namespace {

// One component embed attempt: place guests in BFS order; when a guest has no
// candidate, undo the most recent placement and advance its parent to the
// next-best candidate. Total undo count is bounded.
struct GreedyEmbedder {
  const Graph& g;
  const VertexSet& allowed;
  Embedding& emb;
  long long undo_budget;

  // candidate list for a guest vertex: neighbors of the parent image (or the
  // whole allowed set for roots), free and allowed, best residual degree
  // first, ties by smallest id
  std::vector<int> candidates(int parent_image) const {
    std::vector<int> out;
    VertexSet free = allowed - emb.used;
    if (parent_image < 0) {
      out = free.to_vector();
    } else {
      for (int u : g.neighbors(parent_image)) {
        if (free.contains(u)) out.push_back(u);
      }
    }
    std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
      int da = g.degree_into(a, free), db = g.degree_into(b, free);
      if (da != db) return da > db;
      return a < b;
    });
    return out;
  }

  // order: BFS order of the component, parents before children
  bool run(const std::vector<int>& order, const std::vector<int>& guest_parent, int root_image,
           int* stuck_guest) {
    size_t at = 0;
    std::vector<std::vector<int>> cands(order.size());
    std::vector<size_t> next(order.size(), 0);
    while (at < order.size()) {
      int gv = order[at];
      int gp = guest_parent[gv];
      if (next[at] == 0) {
        if (at == 0 && root_image >= 0) {
          cands[at] = {root_image};
        } else {
          cands[at] = candidates(gp < 0 ? -1 : emb.map[gp]);
        }
      }
      if (next[at] < cands[at].size()) {
        int hv = cands[at][next[at]++];
        if (emb.used.contains(hv)) continue;  // stale candidate after backtrack
        emb.place(gv, hv);
        ++at;
        if (at < order.size()) next[at] = 0;
        continue;
      }
      // exhausted candidates here: back up
      if (at == 0 || undo_budget-- <= 0) {
        *stuck_guest = gv;
        return false;
      }
      --at;
      emb.unplace(order[at]);
    }
    return true;
  }
};

}  // namespace

Embedding embed_forest(const Graph& g, const Forest& f, const VertexSet& allowed,
                       const EmbedConfig& cfg, RngSeed seed) {
  if (allowed.universe() != g.size()) throw InvalidArgument("embed_forest: allowed universe mismatch");
  int total = f.vertex_count();
  if (total > allowed.count()) {
    throw EmbedFailed("embed_forest: forest larger than the allowed set", -1, -1);
  }
  if (cfg.verify) {
    ExpansionParams p;
    p.d = 2.0;
    p.target = allowed;
    ExpansionReport r = check_expands_into(g, p, CheckMode::sampled, cfg.verify_budget, seed.child(77));
    if (!r.holds) throw EmbedFailed("embed_forest: allowed set fails the sampled expansion check", -1, -1);
  }

  auto comps = f.components();
  long long budget0 = cfg.backtrack_steps > 0 ? cfg.backtrack_steps : 50LL * std::max(1, total);
  int last_comp = -1, last_stuck = -1;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Rng rng(seed.child(attempt));
    Embedding emb(f.n, g.size());
    bool ok = true;
    for (size_t ci = 0; ci < comps.size() && ok; ++ci) {
      const auto& comp = comps[ci];
      std::vector<int> parent(f.n, -1);
      std::vector<int> order;
      order.reserve(comp.size());
      // BFS from the component's first vertex over forest adjacency
      std::vector<char> seen(f.n, 0);
      order.push_back(comp[0]);
      seen[comp[0]] = 1;
      for (size_t i = 0; i < order.size(); ++i) {
        for (int u : f.adj[order[i]]) {
          if (!seen[u]) {
            seen[u] = 1;
            parent[u] = order[i];
            order.push_back(u);
          }
        }
      }
      // root image: random free allowed vertex; the randomness makes retries
      // explore different placements while children stay deterministic
      VertexSet free = allowed - emb.used;
      std::vector<int> free_list = free.to_vector();
      if (free_list.empty()) {
        ok = false;
        last_comp = static_cast<int>(ci);
        last_stuck = comp[0];
        break;
      }
      int root_image = free_list[rng.below(free_list.size())];
      GreedyEmbedder ge{g, allowed, emb, budget0};
      int stuck = -1;
      if (!ge.run(order, parent, root_image, &stuck)) {
        ok = false;
        last_comp = static_cast<int>(ci);
        last_stuck = stuck;
      }
    }
    if (ok) return emb;
  }
  throw EmbedFailed("embed_forest: retries exhausted", last_comp, last_stuck);
}

Embedding embed_forest(const Graph& g, const TreeShape& t, const VertexSet& allowed,
                       const EmbedConfig& cfg, RngSeed seed) {
  Forest f;
  f.n = t.size();
  f.present = VertexSet::full(t.size());
  f.adj.assign(t.size(), {});
  for (auto [p, c] : t.edges()) {
    f.adj[p].push_back(c);
    f.adj[c].push_back(p);
  }
  return embed_forest(g, f, allowed, cfg, seed);
}

std::optional<Embedding> embed_tree_at(const Graph& g, const TreeShape& t, int root_image,
                                       const VertexSet& allowed, long long backtrack_budget) {
  Embedding emb(t.size(), g.size());
  std::vector<int> order = t.bfs_order();
  std::vector<int> parent(t.size());
  for (int v = 0; v < t.size(); ++v) parent[v] = t.parent(v);
  GreedyEmbedder ge{g, allowed, emb, backtrack_budget > 0 ? backtrack_budget : 50LL * t.size()};
  int stuck = -1;
  if (!ge.run(order, parent, root_image, &stuck)) return std::nullopt;
  return emb;
}

Embedding embed_rooted_directed(const DiGraph& h, const OrientedTree& t, int root_image,
                                const EmbedConfig& cfg, RngSeed seed) {
  const TreeShape& shape = t.shape;
  if (root_image < 0 || root_image >= h.size()) throw InvalidArgument("embed_rooted_directed: bad root image");
  if (static_cast<int>(t.arc_to_child.size()) != shape.size()) {
    throw InvalidArgument("embed_rooted_directed: orientation list size mismatch");
  }
  std::vector<int> order = shape.bfs_order();
  int last_stuck = -1;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Rng rng(seed.child(attempt));
    Embedding emb(shape.size(), h.size());
    long long budget = cfg.backtrack_steps > 0 ? cfg.backtrack_steps : 50LL * shape.size();
    std::vector<std::vector<int>> cands(order.size());
    std::vector<size_t> next(order.size(), 0);
    size_t at = 0;
    bool done = false;
    while (true) {
      if (at == order.size()) {
        done = true;
        break;
      }
      int gv = order[at];
      if (next[at] == 0) {
        if (at == 0) {
          cands[at] = {root_image};
        } else {
          int pimg = emb.map[shape.parent(gv)];
          const auto& nbrs = t.arc_to_child[gv] ? h.out_neighbors(pimg) : h.in_neighbors(pimg);
          cands[at].clear();
          for (int u : nbrs) {
            if (!emb.used.contains(u)) cands[at].push_back(u);
          }
          // prefer well-connected candidates, break ties at random per attempt
          std::stable_sort(cands[at].begin(), cands[at].end(), [&](int a, int b) {
            return h.out_degree(a) + h.in_degree(a) > h.out_degree(b) + h.in_degree(b);
          });
          if (cands[at].size() > 1) {
            size_t j = rng.below(cands[at].size());
            std::swap(cands[at][0], cands[at][j]);
          }
        }
      }
      if (next[at] < cands[at].size()) {
        int hv = cands[at][next[at]++];
        if (emb.used.contains(hv)) continue;
        emb.place(gv, hv);
        ++at;
        if (at < order.size()) next[at] = 0;
        continue;
      }
      if (at == 0 || budget-- <= 0) {
        last_stuck = gv;
        break;
      }
      --at;
      emb.unplace(order[at]);
    }
    if (done) return emb;
  }
  throw EmbedFailed("embed_rooted_directed: retries exhausted", 0, last_stuck);
}

std::vector<std::vector<int>> attach_stars(const Graph& g, const StarDemand& sd, RngSeed seed) {
  (void)seed;
  size_t k = sd.centers.size();
  if (sd.demand.size() != k) throw InvalidArgument("attach_stars: demand size mismatch");
  for (int c : sd.centers) {
    if (sd.pool.contains(c)) throw InvalidArgument("attach_stars: pool must be disjoint from centers");
  }
  for (int d : sd.demand) {
    if (d <= 0) throw InvalidArgument("attach_stars: demands must be positive");
  }
  std::vector<int> pool_list = sd.pool.to_vector();
  std::vector<int> pool_index(g.size(), -1);
  for (size_t i = 0; i < pool_list.size(); ++i) pool_index[pool_list[i]] = static_cast<int>(i);

  std::vector<std::vector<int>> cand(k);
  for (size_t i = 0; i < k; ++i) {
    for (int u : g.neighbors(sd.centers[i])) {
      if (pool_index[u] >= 0) cand[i].push_back(pool_index[u]);
    }
  }
  GenMatchResult res = generalized_matching(static_cast<int>(pool_list.size()), cand, sd.demand);
  if (!res.ok) {
    std::vector<int> cert;
    cert.reserve(res.deficient.size());
    for (int i : res.deficient) cert.push_back(sd.centers[i]);
    throw MatchingInfeasible("attach_stars: generalized Hall condition fails", cert);
  }
  std::vector<std::vector<int>> out(k);
  for (size_t i = 0; i < k; ++i) {
    for (int r : res.assignment[i]) out[i].push_back(pool_list[r]);
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

EmbeddingReport verify_embedding(const Graph& g, const TreeShape& t, const Embedding& phi) {
  EmbeddingReport rep;
  std::vector<int> owner(g.size(), -1);
  for (int v = 0; v < t.size(); ++v) {
    if (v >= static_cast<int>(phi.map.size()) || phi.map[v] < 0) {
      rep.problems.push_back("unmapped guest vertex " + std::to_string(v));
      continue;
    }
    int h = phi.map[v];
    if (h >= g.size()) {
      rep.problems.push_back("guest " + std::to_string(v) + " mapped outside the host");
      continue;
    }
    if (owner[h] >= 0) {
      rep.problems.push_back("host vertex " + std::to_string(h) + " used twice (guests " +
                             std::to_string(owner[h]) + ", " + std::to_string(v) + ")");
    }
    owner[h] = v;
  }
  for (auto [p, c] : t.edges()) {
    if (p < static_cast<int>(phi.map.size()) && c < static_cast<int>(phi.map.size()) &&
        phi.map[p] >= 0 && phi.map[c] >= 0 && !g.has_edge(phi.map[p], phi.map[c])) {
      rep.problems.push_back("guest edge (" + std::to_string(p) + "," + std::to_string(c) +
                             ") not preserved");
    }
  }
  rep.valid = rep.problems.empty();
  return rep;
}

EmbeddingReport verify_embedding_directed(const DiGraph& g, const OrientedTree& t, const Embedding& phi) {
  EmbeddingReport rep;
  std::vector<int> owner(g.size(), -1);
  for (int v = 0; v < t.shape.size(); ++v) {
    if (phi.map[v] < 0) {
      rep.problems.push_back("unmapped guest vertex " + std::to_string(v));
      continue;
    }
    if (owner[phi.map[v]] >= 0) rep.problems.push_back("host vertex used twice");
    owner[phi.map[v]] = v;
  }
  for (int v = 1; v < t.shape.size(); ++v) {
    int p = t.shape.parent(v);
    if (phi.map[p] < 0 || phi.map[v] < 0) continue;
    bool ok = t.arc_to_child[v] ? g.has_arc(phi.map[p], phi.map[v]) : g.has_arc(phi.map[v], phi.map[p]);
    if (!ok) rep.problems.push_back("guest arc at vertex " + std::to_string(v) + " not preserved");
  }
  rep.valid = rep.problems.empty();
  return rep;
}

void write_embedding(std::ostream& os, const Embedding& e) {
  for (size_t v = 0; v < e.map.size(); ++v) {
    if (e.map[v] >= 0) os << v << ' ' << e.map[v] << '\n';
  }
}

Embedding read_embedding(std::istream& is, int guest_n, int host_n) {
  Embedding e(guest_n, host_n);
  int gv, hv;
  while (is >> gv >> hv) {
    if (gv < 0 || gv >= guest_n || hv < 0 || hv >= host_n) throw InvalidArgument("embedding: id out of range");
    e.place(gv, hv);
  }
  return e;
}

}  // namespace tw
