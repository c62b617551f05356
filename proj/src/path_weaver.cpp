#include "treeweave/path_weaver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <type_traits>

#include "treeweave/embed.hpp"
#include "treeweave/errors.hpp"
#include "treeweave/expansion.hpp"
#include "treeweave/matching.hpp"

namespace tw {

bool validate_path(const Graph& g, const ExactPath& p) {
  if (p.vertices.size() < 2) return false;
  VertexSet seen(g.size());
  for (int v : p.vertices) {
    if (v < 0 || v >= g.size() || seen.contains(v)) return false;
    seen.insert(v);
  }
  for (size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    if (!g.has_edge(p.vertices[i], p.vertices[i + 1])) return false;
  }
  return true;
}

bool validate_path_directed(const DiGraph& g, const ExactPath& p,
                            const std::vector<int8_t>& orientations) {
  if (p.vertices.size() < 2) return false;
  if (orientations.size() != p.vertices.size() - 1) return false;
  VertexSet seen(g.size());
  for (int v : p.vertices) {
    if (v < 0 || v >= g.size() || seen.contains(v)) return false;
    seen.insert(v);
  }
  for (size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    int a = p.vertices[i], b = p.vertices[i + 1];
    bool ok = orientations[i] > 0 ? g.has_arc(a, b) : g.has_arc(b, a);
    if (!ok) return false;
  }
  return true;
}

std::optional<std::vector<int>> find_path_exact(const Graph& g, int x, int y, int k,
                                                const VertexSet& avail, Rng& rng, long long budget) {
  if (x == y || k < 1 || x < 0 || y < 0) return std::nullopt;
  if (k == 1) {
    if (g.has_edge(x, y)) return std::vector<int>{x, y};
    return std::nullopt;
  }
  VertexSet walk = avail;
  if (walk.contains(x)) walk.erase(x);
  if (walk.contains(y)) walk.erase(y);
  walk.insert(x);
  std::vector<int> dist_y = bfs_distances(g, y, walk);
  if (dist_y[x] < 0 || dist_y[x] > k) return std::nullopt;

  std::vector<int> path{x};
  VertexSet on_path(g.size());
  on_path.insert(x);
  long long steps = budget;

  std::function<bool(int, int)> dfs = [&](int v, int rem) -> bool {
    if (steps-- <= 0) return false;
    if (rem == 1) {
      if (g.has_edge(v, y)) {
        path.push_back(y);
        return true;
      }
      return false;
    }
    std::vector<int> nbrs;
    for (int u : g.neighbors(v)) {
      if (u != y && avail.contains(u) && !on_path.contains(u) && dist_y[u] >= 1 &&
          dist_y[u] <= rem - 1) {
        nbrs.push_back(u);
      }
    }
    rng.shuffle(nbrs);
    for (int u : nbrs) {
      path.push_back(u);
      on_path.insert(u);
      if (dfs(u, rem - 1)) return true;
      path.pop_back();
      on_path.erase(u);
      if (steps <= 0) return false;
    }
    return false;
  };
  if (dfs(x, k)) return path;
  return std::nullopt;
}

std::optional<std::vector<int>> find_path_exact_directed(const DiGraph& g, int x, int y,
                                                         const std::vector<int8_t>& orientations,
                                                         const VertexSet& avail, Rng& rng,
                                                         long long budget) {
  int k = static_cast<int>(orientations.size());
  if (x == y || k < 1 || x < 0 || y < 0) return std::nullopt;
  auto step_ok = [&](int from, int to, int8_t o) {
    return o > 0 ? g.has_arc(from, to) : g.has_arc(to, from);
  };
  if (k == 1) {
    if (step_ok(x, y, orientations[0])) return std::vector<int>{x, y};
    return std::nullopt;
  }
  // position-aware reachability layers: layer[pos] holds the vertices from
  // which y is reachable by following orientations pos..k-1
  int n = g.size();
  std::vector<VertexSet> layer(k + 1, VertexSet(n));
  layer[k].insert(y);
  for (int pos = k - 1; pos >= 1; --pos) {
    const VertexSet& nxt = layer[pos + 1];
    VertexSet cur(n);
    nxt.for_each([&](int u) {
      // v -> u uses orientation[pos]; collect admissible v in avail
      const auto& back = orientations[pos] > 0 ? g.in_neighbors(u) : g.out_neighbors(u);
      for (int v : back) {
        if (avail.contains(v)) cur.insert(v);
      }
    });
    layer[pos] = std::move(cur);
  }

  std::vector<int> path{x};
  VertexSet on_path(n);
  on_path.insert(x);
  long long steps = budget;

  std::function<bool(int, int)> dfs = [&](int v, int pos) -> bool {
    if (steps-- <= 0) return false;
    if (pos == k - 1) {
      if (step_ok(v, y, orientations[pos])) {
        path.push_back(y);
        return true;
      }
      return false;
    }
    std::vector<int> nbrs;
    const auto& fwd = orientations[pos] > 0 ? g.out_neighbors(v) : g.in_neighbors(v);
    for (int u : fwd) {
      if (u != y && avail.contains(u) && !on_path.contains(u) && layer[pos + 1].contains(u)) {
        nbrs.push_back(u);
      }
    }
    rng.shuffle(nbrs);
    for (int u : nbrs) {
      path.push_back(u);
      on_path.insert(u);
      if (dfs(u, pos + 1)) return true;
      path.pop_back();
      on_path.erase(u);
      if (steps <= 0) return false;
    }
    return false;
  };
  if (dfs(x, 0)) return path;
  return std::nullopt;
}

namespace {

// Iteratively delete low-expansion sets: first any vertex with too few
// neighbors inside, then sampled small violating sets. Returns the carved
// core, or an empty set when peeling consumed too much.
VertexSet peel_core(const Graph& g, VertexSet set, double two_d, Rng& rng, int sample_budget) {
  int start = set.count();
  int removed = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    bool again = true;
    while (again) {
      again = false;
      std::vector<int> drop;
      set.for_each([&](int v) {
        if (static_cast<double>(g.degree_into(v, set)) < two_d) drop.push_back(v);
      });
      for (int v : drop) {
        set.erase(v);
        ++removed;
        again = true;
        changed = true;
      }
    }
    std::vector<int> members = set.to_vector();
    if (static_cast<int>(members.size()) < 5) break;
    for (int t = 0; t < sample_budget; ++t) {
      int s = 2 + static_cast<int>(rng.below(3));
      VertexSet a(g.size());
      for (int j = 0; j < s; ++j) a.insert(members[rng.below(members.size())]);
      if (static_cast<double>(neighborhood(g, a, set).count()) < two_d * a.count()) {
        a.for_each([&](int v) {
          if (set.contains(v)) {
            set.erase(v);
            ++removed;
          }
        });
        changed = true;
        members = set.to_vector();
        if (static_cast<int>(members.size()) < 5) break;
      }
    }
    if (removed > start / 2) return VertexSet(g.size());
  }
  return set;
}

// Guest tree for the one-path construction: a handle path of `handle` edges
// whose far end is the root of a complete d-ary tree of the given depth.
// Vertex 0 is the handle end that gets pinned on the request endpoint.
struct GrowthTree {
  TreeShape shape;
  std::vector<int> last_level;  // guest ids at maximum depth
  std::vector<int> depth;       // from vertex 0
};

GrowthTree make_growth_tree(int handle, int d, int tree_depth) {
  std::vector<int> parent{-1};
  std::vector<int> depth{0};
  int prev = 0;
  for (int i = 1; i <= handle; ++i) {
    parent.push_back(prev);
    depth.push_back(i);
    prev = static_cast<int>(parent.size()) - 1;
  }
  int root = prev;  // d-ary root sits at depth `handle`
  std::vector<int> frontier{root};
  for (int lev = 0; lev < tree_depth; ++lev) {
    std::vector<int> next;
    for (int f : frontier) {
      for (int c = 0; c < d; ++c) {
        parent.push_back(f);
        depth.push_back(depth[f] + 1);
        next.push_back(static_cast<int>(parent.size()) - 1);
      }
    }
    frontier = std::move(next);
  }
  GrowthTree gt;
  gt.shape = TreeShape(std::move(parent));
  gt.last_level = std::move(frontier);
  gt.depth = std::move(depth);
  return gt;
}

std::vector<int> guest_chain_to_root(const TreeShape& t, int v) {  // v .. 0
  std::vector<int> chain;
  while (v >= 0) {
    chain.push_back(v);
    v = t.parent(v);
  }
  return chain;
}

}  // namespace

std::optional<std::pair<int, ExactPath>> find_one_exact_path(const Graph& g,
                                                             const std::vector<PathRequest>& requests,
                                                             const VertexSet& u,
                                                             const WeaveConfig& cfg, RngSeed seed) {
  if (requests.empty()) return std::nullopt;
  for (const auto& r : requests) {
    if (r.x == r.y || r.k < 1) throw InvalidArgument("find_one_exact_path: bad request");
    if (u.contains(r.x) || u.contains(r.y)) {
      throw InvalidArgument("find_one_exact_path: U must avoid request endpoints");
    }
  }
  Rng rng(seed);
  int n = g.size();
  int m = static_cast<int>(requests.size());

  // split U in two halves and carve expanding cores out of each
  std::vector<int> members = u.to_vector();
  rng.shuffle(members);
  VertexSet u1(n), u2(n);
  for (size_t i = 0; i < members.size(); ++i) (i % 2 == 0 ? u1 : u2).insert(members[i]);
  double d = cfg.core_d > 0 ? cfg.core_d
                            : std::max(2.0, static_cast<double>(u.count()) / (200.0 * m));
  VertexSet v1 = peel_core(g, u1, 2.0 * d, rng, 200);
  VertexSet v2 = peel_core(g, u2, 2.0 * d, rng, 200);

  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  rng.shuffle(order);

  if (!v1.empty() && !v2.empty()) {
    int di = std::max(2, static_cast<int>(d));
    int l = std::max(1, static_cast<int>(std::ceil(std::log(std::max(2, m)) /
                                                   std::log(static_cast<double>(di)))));
    for (int i : order) {
      const PathRequest& req = requests[i];
      if (!req.orientations.empty()) continue;  // oriented requests use the directed machinery
      int ha = req.k / 2 - l - 1;
      int hb = (req.k + 1) / 2 - l - 1;
      if (ha < 0 || hb < 0) continue;
      if (g.degree_into(req.x, v1) < 2 * di || g.degree_into(req.y, v2) < 2 * di) continue;
      // keep the guest trees comfortably smaller than the cores
      double tree_size = ha + hb + 2.0 * std::pow(di + 1.0, l + 1);
      if (tree_size > 0.45 * (v1.count() + v2.count())) continue;

      GrowthTree ta = make_growth_tree(ha, di, l);
      auto embA = embed_tree_at(g, ta.shape, req.x, v1, 50LL * n);
      if (!embA) continue;
      VertexSet v2_free = v2 - embA->used;
      GrowthTree tb = make_growth_tree(hb, di, l);
      auto embB = embed_tree_at(g, tb.shape, req.y, v2_free, 50LL * n);
      if (!embB) continue;

      VertexSet la(n), lb(n);
      for (int gv : ta.last_level) la.insert(embA->map[gv]);
      for (int gv : tb.last_level) lb.insert(embB->map[gv]);
      VertexSet mid_pool = u - embA->used;
      mid_pool -= embB->used;
      VertexSet ca = neighborhood(g, la, mid_pool);
      VertexSet cb = neighborhood(g, lb, mid_pool);
      ca &= cb;
      int join = ca.first();
      if (join < 0) continue;
      int va = -1, vb = -1;
      for (int gv : ta.last_level) {
        if (g.has_edge(embA->map[gv], join)) {
          va = gv;
          break;
        }
      }
      for (int gv : tb.last_level) {
        if (g.has_edge(embB->map[gv], join)) {
          vb = gv;
          break;
        }
      }
      std::vector<int> chain_a = guest_chain_to_root(ta.shape, va);  // va..0
      std::vector<int> chain_b = guest_chain_to_root(tb.shape, vb);
      ExactPath p;
      for (auto it = chain_a.rbegin(); it != chain_a.rend(); ++it) p.vertices.push_back(embA->map[*it]);
      p.vertices.push_back(join);
      for (int gv : chain_b) p.vertices.push_back(embB->map[gv]);  // vb .. y
      if (p.length() == req.k && validate_path(g, p)) return std::make_pair(i, p);
    }
  }

  // budgeted DFS fallback
  for (int i : order) {
    const PathRequest& req = requests[i];
    std::optional<std::vector<int>> got;
    if (req.orientations.empty()) {
      got = find_path_exact(g, req.x, req.y, req.k, u, rng, cfg.search_budget);
    } else {
      got = find_path_exact_directed(g, req.x, req.y, req.orientations, u, rng, cfg.search_budget);
    }
    if (got) {
      ExactPath p;
      p.vertices = std::move(*got);
      return std::make_pair(i, p);
    }
  }
  return std::nullopt;
}

namespace {

struct EndSet {
  std::vector<int> verts;    // insertion order; verts[0] is the anchor endpoint
  std::vector<int> depth;    // steps from the anchor
  std::vector<int> parent;   // index into verts, -1 for the anchor
  VertexSet mask;

  explicit EndSet(int n) : mask(n) {}
  void add(int v, int dep, int par) {
    verts.push_back(v);
    depth.push_back(dep);
    parent.push_back(par);
    mask.insert(v);
  }
  std::vector<int> chain_to_anchor(int idx) const {  // verts[idx] .. anchor
    std::vector<int> out;
    while (idx >= 0) {
      out.push_back(verts[idx]);
      idx = parent[idx];
    }
    return out;
  }
};

struct StageFail {
  int alpha;
  int survivors;
};

struct ConnectScratch {
  std::vector<std::optional<ExactPath>> done;
  std::vector<int> surviving;
  std::vector<EndSet> s_sets, t_sets;  // indexed by request id
};

}  // namespace

// Shared implementation; the host type switches neighbor semantics and search.
template <class Host>
static std::vector<ExactPath> connect_pairs_impl(const Host& g,
                                                 const std::vector<PathRequest>& requests,
                                                 const VertexSet& w, const WeaveConfig& cfg,
                                                 RngSeed seed) {
  constexpr bool directed = std::is_same_v<Host, DiGraph>;
  const int n = g.size();
  const int r = static_cast<int>(requests.size());
  if (r == 0) return {};
  long long total_k = 0;
  int wsize = w.count();
  int max_len = cfg.max_len > 0 ? cfg.max_len : wsize;
  VertexSet endpoints(n);
  for (const auto& req : requests) {
    if (req.x == req.y || req.k < 1) throw InvalidArgument("connect_pairs: bad request");
    if (req.k < cfg.min_len || req.k > max_len) throw InvalidArgument("connect_pairs: length outside the configured window");
    if (directed && static_cast<int>(req.orientations.size()) != req.k) {
      throw InvalidArgument("connect_pairs: orientation list size mismatch");
    }
    if (w.contains(req.x) || w.contains(req.y)) throw InvalidArgument("connect_pairs: W must avoid endpoints");
    if (endpoints.contains(req.x) || endpoints.contains(req.y)) {
      throw InvalidArgument("connect_pairs: endpoints not disjoint");
    }
    endpoints.insert(req.x);
    endpoints.insert(req.y);
    total_k += req.k;
  }
  if (4 * total_k > 3LL * wsize) throw InvalidArgument("connect_pairs: total length exceeds 3|W|/4");

  int d0 = cfg.d0 > 0 ? cfg.d0 : 2;
  double d_main = cfg.d_main > 0 ? cfg.d_main : 8.0 * d0;
  int m = std::max(1, static_cast<int>(std::llround(wsize / (2.0 * d_main))));
  int stages = cfg.stages > 0 ? cfg.stages : 3;
  // every part needs room for a d0-matching from up to 4m set vertices
  while (stages > 1 && wsize / (4 * stages) < 2 * d0 * std::min(2 * m, r) + 1) --stages;
  long long stage0_budget = cfg.stage0_budget > 0 ? cfg.stage0_budget : cfg.search_budget;

  StageFail last{0, r};
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    RngSeed aseed = seed.child(attempt);
    Rng rng(aseed.child(999));

    int part_size = std::max(1, wsize / (4 * stages));
    std::vector<int> sizes(stages, part_size);
    sizes.push_back(wsize - stages * part_size);  // U
    SplitConfig scfg;
    scfg.max_retries = 4;
    scfg.verify_budget = cfg.split_verify_budget;
    scfg.enforce_k_cap = false;
    std::vector<VertexSet> parts;
    try {
      if constexpr (std::is_same_v<Host, Graph>) {
        parts = split_target(g, w, sizes, d_main, aseed.child(1), scfg);
      } else {
        parts = split_target_directed(g, w, sizes, d_main, aseed.child(1), scfg);
      }
    } catch (const RetriesExhausted&) {
      continue;
    }
    VertexSet u_avail = parts.back();

    ConnectScratch sc;
    sc.done.assign(r, std::nullopt);
    for (int i = 0; i < r; ++i) {
      sc.s_sets.emplace_back(n);
      sc.t_sets.emplace_back(n);
    }

    auto search_mid = [&](int x, int y, int k, const std::vector<int8_t>* orient,
                          const VertexSet& avail, long long budget) -> std::optional<std::vector<int>> {
      if constexpr (std::is_same_v<Host, Graph>) {
        (void)orient;
        return find_path_exact(g, x, y, k, avail, rng, budget);
      } else {
        return find_path_exact_directed(g, x, y, *orient, avail, rng, budget);
      }
    };

    // stage 0: greedy through U, longest requests first
    std::vector<int> order(r);
    for (int i = 0; i < r; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (requests[a].k != requests[b].k) return requests[a].k > requests[b].k;
      return a < b;
    });
    for (int i : order) {
      const auto& req = requests[i];
      auto got = search_mid(req.x, req.y, req.k, &req.orientations, u_avail, stage0_budget);
      if (got) {
        ExactPath p;
        p.vertices = std::move(*got);
        for (size_t j = 1; j + 1 < p.vertices.size(); ++j) u_avail.erase(p.vertices[j]);
        sc.done[i] = std::move(p);
      } else {
        sc.surviving.push_back(i);
        sc.s_sets[i].add(req.x, 0, -1);
        sc.t_sets[i].add(req.y, 0, -1);
      }
    }

    bool attempt_ok = true;
    for (int alpha = 0; alpha <= stages; ++alpha) {
      double bound = 2.0 * m / std::pow(d0 + 1.0, alpha);
      if (static_cast<double>(sc.surviving.size()) > bound + 1e-9) {
        last = StageFail{alpha, static_cast<int>(sc.surviving.size())};
        attempt_ok = false;
        break;
      }
      if (cfg.audit) {
        // stage invariants: set sizes, disjointness, exactness, reachability
        VertexSet seen(n);
        long long expect = static_cast<long long>(std::pow(d0 + 1.0, alpha));
        for (int i : sc.surviving) {
          if (sc.s_sets[i].verts.size() != static_cast<size_t>(expect) ||
              sc.t_sets[i].verts.size() != static_cast<size_t>(expect)) {
            throw Error("connect_pairs: end-set size invariant broken");
          }
          for (const EndSet* es : {&sc.s_sets[i], &sc.t_sets[i]}) {
            for (size_t j = 0; j < es->verts.size(); ++j) {
              if (seen.contains(es->verts[j])) throw Error("connect_pairs: end-sets overlap");
              seen.insert(es->verts[j]);
              if (es->depth[j] > alpha) throw Error("connect_pairs: end-set reach invariant broken");
            }
          }
        }
        for (int i = 0; i < r; ++i) {
          if (!sc.done[i]) continue;
          for (int v : sc.done[i]->vertices) {
            if (v != requests[i].x && v != requests[i].y) {
              if (seen.contains(v)) throw Error("connect_pairs: paths overlap");
              seen.insert(v);
            }
          }
          if (sc.done[i]->length() != requests[i].k) throw Error("connect_pairs: wrong path length");
        }
      }
      if (cfg.on_stage) {
        StageSnapshot snap;
        snap.alpha = alpha;
        snap.m = m;
        snap.d0 = d0;
        snap.surviving = sc.surviving;
        for (int i : sc.surviving) {
          snap.s_sets.push_back(sc.s_sets[i].mask);
          snap.t_sets.push_back(sc.t_sets[i].mask);
        }
        for (int i = 0; i < r; ++i) {
          if (sc.done[i]) snap.done.push_back(*sc.done[i]);
        }
        cfg.on_stage(snap);
      }
      if (sc.surviving.empty() || alpha == stages) break;

      // extend every surviving end-set by a d0-matching into the next part
      const VertexSet& pool = parts[alpha];
      std::vector<int> pool_list = pool.to_vector();
      std::vector<int> pool_index(n, -1);
      for (size_t j = 0; j < pool_list.size(); ++j) pool_index[pool_list[j]] = static_cast<int>(j);
      struct Source {
        int req;
        bool s_side;
        int idx;  // index in the end set
      };
      std::vector<Source> sources;
      std::vector<std::vector<int>> cands;
      for (int i : sc.surviving) {
        for (int side = 0; side < 2; ++side) {
          EndSet& es = side == 0 ? sc.s_sets[i] : sc.t_sets[i];
          for (size_t j = 0; j < es.verts.size(); ++j) {
            int v = es.verts[j];
            std::vector<int> c;
            if constexpr (std::is_same_v<Host, Graph>) {
              for (int nb : g.neighbors(v)) {
                if (pool_index[nb] >= 0) c.push_back(pool_index[nb]);
              }
            } else {
              // follow the request's orientation at this position
              const auto& req = requests[i];
              bool forward;
              if (side == 0) {
                forward = req.orientations[es.depth[j]] > 0;
              } else {
                forward = req.orientations[req.k - 1 - es.depth[j]] < 0;
              }
              const auto& nbs = forward ? g.out_neighbors(v) : g.in_neighbors(v);
              for (int nb : nbs) {
                if (pool_index[nb] >= 0) c.push_back(pool_index[nb]);
              }
            }
            sources.push_back(Source{i, side == 0, static_cast<int>(j)});
            cands.push_back(std::move(c));
          }
        }
      }
      GenMatchResult match = generalized_matching(static_cast<int>(pool_list.size()), cands,
                                                  std::vector<int>(sources.size(), d0));
      if (!match.ok) {
        last = StageFail{alpha, static_cast<int>(sc.surviving.size())};
        attempt_ok = false;
        break;
      }
      for (size_t si = 0; si < sources.size(); ++si) {
        EndSet& es = sources[si].s_side ? sc.s_sets[sources[si].req] : sc.t_sets[sources[si].req];
        for (int ri : match.assignment[si]) {
          es.add(pool_list[ri], es.depth[sources[si].idx] + 1, sources[si].idx);
        }
      }

      // try to finish each surviving request inside U plus its own end-sets
      std::vector<int> still;
      for (int i : sc.surviving) {
        const auto& req = requests[i];
        bool connected = false;
        {
          VertexSet wide = u_avail | sc.s_sets[i].mask | sc.t_sets[i].mask;
          wide.erase(req.x);
          wide.erase(req.y);
          auto got = search_mid(req.x, req.y, req.k, &req.orientations, wide, cfg.search_budget);
          if (got) {
            ExactPath p;
            p.vertices = std::move(*got);
            for (size_t j = 1; j + 1 < p.vertices.size(); ++j) {
              if (u_avail.contains(p.vertices[j])) u_avail.erase(p.vertices[j]);
            }
            sc.done[i] = std::move(p);
            connected = true;
          }
        }
        if (!connected) {
          // pair up end-set vertices in id order, route between them with the
          // length adjusted by their offsets from the endpoints
          EndSet& ss = sc.s_sets[i];
          EndSet& ts = sc.t_sets[i];
          std::vector<int> sidx(ss.verts.size()), tidx(ts.verts.size());
          for (size_t j = 0; j < sidx.size(); ++j) sidx[j] = static_cast<int>(j);
          for (size_t j = 0; j < tidx.size(); ++j) tidx[j] = static_cast<int>(j);
          std::sort(sidx.begin(), sidx.end(), [&](int a, int b) { return ss.verts[a] < ss.verts[b]; });
          std::sort(tidx.begin(), tidx.end(), [&](int a, int b) { return ts.verts[a] < ts.verts[b]; });
          for (size_t j = 0; j < sidx.size() && !connected; ++j) {
            int si_ = sidx[j], ti_ = tidx[j];
            int ds = ss.depth[si_], dt = ts.depth[ti_];
            int adj = requests[i].k - ds - dt;
            if (adj < 1) continue;
            int sv = ss.verts[si_], tv = ts.verts[ti_];
            if (sv == tv) continue;
            std::optional<std::vector<int>> mid;
            std::vector<int8_t> slice;
            if (!req.orientations.empty()) {
              slice.assign(req.orientations.begin() + ds, req.orientations.begin() + ds + adj);
            }
            mid = search_mid(sv, tv, adj, &slice, u_avail, cfg.search_budget);
            if (!mid) continue;
            std::vector<int> full = ss.chain_to_anchor(si_);  // sv .. x
            std::reverse(full.begin(), full.end());           // x .. sv
            full.insert(full.end(), mid->begin() + 1, mid->end());
            std::vector<int> tail = ts.chain_to_anchor(ti_);  // tv .. y
            full.insert(full.end(), tail.begin() + 1, tail.end());
            ExactPath p;
            p.vertices = std::move(full);
            bool valid;
            if constexpr (std::is_same_v<Host, Graph>) {
              valid = p.length() == req.k && validate_path(g, p);
            } else {
              valid = p.length() == req.k && validate_path_directed(g, p, req.orientations);
            }
            if (!valid) continue;
            for (size_t q = 1; q + 1 < p.vertices.size(); ++q) {
              if (u_avail.contains(p.vertices[q])) u_avail.erase(p.vertices[q]);
            }
            sc.done[i] = std::move(p);
            connected = true;
          }
        }
        if (!connected) still.push_back(i);
      }
      sc.surviving = std::move(still);
    }

    if (attempt_ok && sc.surviving.empty()) {
      std::vector<ExactPath> out;
      out.reserve(r);
      for (int i = 0; i < r; ++i) out.push_back(std::move(*sc.done[i]));
      return out;
    }
    if (!sc.surviving.empty()) last = StageFail{stages, static_cast<int>(sc.surviving.size())};
  }

  // tiny instances admit a complete joint search before giving up
  if (n <= 20 && r <= 4 && total_k <= 24) {
    std::vector<ExactPath> acc;
    VertexSet avail = w;
    std::function<bool(int)> joint = [&](int at) -> bool {
      if (at == r) return true;
      const auto& req = requests[at];
      std::vector<int> path{req.x};
      VertexSet on(n);
      on.insert(req.x);
      std::function<bool(int, int)> walk = [&](int v, int pos) -> bool {
        if (pos == req.k - 1) {
          bool edge_ok;
          if constexpr (directed) {
            edge_ok = req.orientations[pos] > 0 ? g.has_arc(v, req.y) : g.has_arc(req.y, v);
          } else {
            edge_ok = g.has_edge(v, req.y);
          }
          if (!edge_ok) return false;
          path.push_back(req.y);
          ExactPath p;
          p.vertices = path;
          acc.push_back(p);
          VertexSet saved = avail;
          for (size_t q2 = 1; q2 + 1 < path.size(); ++q2) avail.erase(path[q2]);
          if (joint(at + 1)) return true;
          avail = saved;
          acc.pop_back();
          path.pop_back();
          return false;
        }
        std::vector<int> nbs;
        if constexpr (directed) {
          nbs = req.orientations[pos] > 0 ? g.out_neighbors(v) : g.in_neighbors(v);
        } else {
          nbs = g.neighbors(v);
        }
        for (int u : nbs) {
          if (u == req.y || !avail.contains(u) || on.contains(u)) continue;
          path.push_back(u);
          on.insert(u);
          if (walk(u, pos + 1)) return true;
          on.erase(u);
          path.pop_back();
        }
        return false;
      };
      return req.k == 1 ? walk(req.x, 0) : walk(req.x, 0);
    };
    if (joint(0)) return acc;
  }
  throw StageStalled("connect_pairs: survivors stopped shrinking", last.alpha, last.survivors);
}

std::vector<ExactPath> connect_pairs_exact(const Graph& g, const std::vector<PathRequest>& requests,
                                           const VertexSet& w, const WeaveConfig& cfg, RngSeed seed) {
  for (const auto& r : requests) {
    if (!r.orientations.empty()) throw InvalidArgument("connect_pairs_exact: oriented request on an undirected host");
  }
  return connect_pairs_impl(g, requests, w, cfg, seed);
}

std::vector<ExactPath> connect_pairs_exact_directed(const DiGraph& g,
                                                    const std::vector<PathRequest>& requests,
                                                    const VertexSet& w, const WeaveConfig& cfg,
                                                    RngSeed seed) {
  return connect_pairs_impl(g, requests, w, cfg, seed);
}

}  // namespace tw
