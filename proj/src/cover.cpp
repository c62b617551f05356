#include "treeweave/cover.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "treeweave/errors.hpp"
#include "treeweave/expansion.hpp"
#include "treeweave/matching.hpp"

namespace tw {

namespace {

// Chain segment lengths for the non-structure pairs: a few roomy segments and
// one endgame-eligible segment of length sigma_b at the end.
std::vector<int> chain_segments(int l, int sigma_b, int sigma_a) {
  int head = l - 1 - sigma_b;
  if (head == 0) return {sigma_b};
  int parts = std::max(1, (head + sigma_a - 1) / sigma_a);
  while (head / parts < 2) --parts;  // segments of length >= 2
  std::vector<int> out(parts, head / parts);
  for (int i = 0; i < head % parts; ++i) ++out[i];
  out.push_back(sigma_b);
  return out;
}

struct CoverPlan {
  int q = 0, s = 0, r = 0;
  std::vector<int> segs;  // per non-structure chain
};

CoverPlan make_plan(int n, int l, size_t pair_count, const CoverConfig& cfg) {
  CoverPlan plan;
  if (l < 2 || n % l != 0) throw CoverFailed("cover: need l >= 2 and l | n", CoverPhase::reduction);
  plan.q = n / l;
  if (static_cast<int>(pair_count) != plan.q) {
    throw CoverFailed("cover: need exactly n/l pairs", CoverPhase::reduction);
  }
  int sb = cfg.sigma_b;
  if (sb < 4) throw CoverFailed("cover: sigma_b must be >= 4", CoverPhase::reduction);
  if (l - 1 < sb) throw CoverFailed("cover: l too small for the endgame segment", CoverPhase::reduction);
  int head = l - 1 - sb;
  if (head == 1) throw CoverFailed("cover: l - 1 - sigma_b must be 0 or >= 2", CoverPhase::reduction);
  int s = cfg.stragglers > 0 ? cfg.stragglers : std::max(1, plan.q / 12);
  while (s > 1 && 3 * s * (sb - 2) + s > plan.q) --s;
  plan.s = s;
  plan.r = s * (sb - 2);
  if (3 * plan.r + plan.s > plan.q) {
    throw CoverFailed("cover: too few pairs for the absorbing structure", CoverPhase::reduction);
  }
  plan.segs = chain_segments(l, sb, cfg.sigma_a);
  return plan;
}

// Exhaustive backtracking partition search for tiny instances.
bool small_cover_rec(const Graph& g, const std::vector<std::pair<int, int>>& pairs, int l, size_t at,
                     VertexSet& free, std::vector<ExactPath>& acc) {
  if (at == pairs.size()) return free.empty();
  auto [x, y] = pairs[at];
  std::vector<int> path{x};
  VertexSet on(g.size());
  on.insert(x);
  std::function<bool(int, int)> dfs = [&](int v, int rem) -> bool {
    if (rem == 1) {
      if (!g.has_edge(v, y)) return false;
      path.push_back(y);
      ExactPath p;
      p.vertices = path;
      acc.push_back(p);
      if (small_cover_rec(g, pairs, l, at + 1, free, acc)) return true;
      acc.pop_back();
      path.pop_back();
      return false;
    }
    for (int u : g.neighbors(v)) {
      if (u == y || !free.contains(u) || on.contains(u)) continue;
      path.push_back(u);
      on.insert(u);
      free.erase(u);
      if (dfs(u, rem - 1)) return true;
      free.insert(u);
      on.erase(u);
      path.pop_back();
    }
    return false;
  };
  return dfs(x, l - 1);
}

void check_partition(const Graph& g, const std::vector<std::pair<int, int>>& pairs, int l,
                     const std::vector<ExactPath>& paths) {
  int n = g.size();
  if (paths.size() != pairs.size()) throw Error("cover: wrong path count");
  VertexSet seen(n);
  for (size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].length() != l - 1) throw Error("cover: wrong path length");
    if (paths[i].front() != pairs[i].first || paths[i].back() != pairs[i].second) {
      throw Error("cover: wrong endpoints");
    }
    for (size_t j = 0; j + 1 < paths[i].vertices.size(); ++j) {
      if (!g.has_edge(paths[i].vertices[j], paths[i].vertices[j + 1])) {
        throw Error("cover: not a host path");
      }
    }
    for (int v : paths[i].vertices) {
      if (seen.contains(v)) throw Error("cover: paths overlap");
      seen.insert(v);
    }
  }
  if (seen.count() != n) throw Error("cover: not a partition of V");
}

}  // namespace

std::vector<ExactPath> cover_with_paths(const Graph& g, const std::vector<std::pair<int, int>>& pairs,
                                        int l, const CoverConfig& cfg, RngSeed seed) {
  const int n = g.size();
  VertexSet endpoints(n);
  for (auto [x, y] : pairs) {
    if (x == y || endpoints.contains(x) || endpoints.contains(y)) {
      throw InvalidArgument("cover_with_paths: endpoints must be distinct");
    }
    endpoints.insert(x);
    endpoints.insert(y);
  }
  CoverPlan plan = make_plan(n, l, pairs.size(), cfg);

  if (cfg.verify_expansion) {
    ExpansionParams p;
    p.d = 2.0;
    p.target = VertexSet::full(n) - endpoints;
    ExpansionReport rep = check_expands_into(g, p, CheckMode::sampled, cfg.verify_budget, seed.child(91));
    if (!rep.holds) throw CoverFailed("cover: host fails the sampled expansion check", CoverPhase::reduction);
  }

  // tiny hosts: exhaustive search
  if (n <= cfg.small_n) {
    VertexSet free = VertexSet::full(n) - endpoints;
    std::vector<ExactPath> acc;
    if (small_cover_rec(g, pairs, l, 0, free, acc)) {
      check_partition(g, pairs, l, acc);
      return acc;
    }
    throw CoverFailed("cover: exhaustive search found no partition", CoverPhase::endgame);
  }

  const int q = plan.q, s = plan.s, r = plan.r;
  const int sigma_b = cfg.sigma_b;
  std::string last_fail = "?";
  CoverPhase last_phase = CoverPhase::reduction;

  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    RngSeed aseed = seed.child(attempt + 1);
    Rng rng(aseed.child(0));
    try {
      // A: the flexible set; the structure lives in the rest of W
      VertexSet w_all = VertexSet::full(n) - endpoints;
      std::vector<int> wlist = w_all.to_vector();
      rng.shuffle(wlist);
      VertexSet a_set(n);
      for (int i = 0; i < 2 * r; ++i) a_set.insert(wlist[i]);
      VertexSet w_str = w_all - a_set;

      std::vector<int> xs, ys;
      for (int j = 0; j < 3 * r; ++j) {
        xs.push_back(pairs[j].first);
        ys.push_back(pairs[j].second);
      }
      AbsorbingStructure st;
      try {
        st = build_absorbing_structure(g, a_set, w_str, xs, ys, l, cfg.structure, aseed.child(1));
      } catch (const Error& e) {
        last_fail = e.what();
        last_phase = CoverPhase::absorber_build;
        continue;
      }

      // chain routing through the leftover of the structure's working set
      VertexSet z_avail = w_str - st.w_prime;
      const std::vector<int>& segs = plan.segs;
      int nseg = static_cast<int>(segs.size());
      int chains = q - 3 * r;
      // one label vertex between consecutive segments
      std::vector<std::vector<int>> marks(chains);
      {
        std::vector<int> zlist = z_avail.to_vector();
        rng.shuffle(zlist);
        size_t at = 0;
        for (int c = 0; c < chains; ++c) {
          for (int j = 0; j + 1 < nseg; ++j) {
            if (at >= zlist.size()) throw CoverFailed("cover: ran out of label vertices", CoverPhase::endgame);
            marks[c].push_back(zlist[at++]);
          }
        }
        for (int c = 0; c < chains; ++c) {
          for (int v : marks[c]) z_avail.erase(v);
        }
      }

      // head segments must all connect
      std::vector<std::vector<ExactPath>> head_paths(chains);
      bool ok = true;
      for (int c = 0; c < chains && ok; ++c) {
        int from = pairs[3 * r + c].first;
        for (int j = 0; j + 1 < nseg; ++j) {
          int to = marks[c][j];
          auto got = find_path_exact(g, from, to, segs[j], z_avail, rng, cfg.weave.search_budget);
          if (!got) {
            ok = false;
            break;
          }
          ExactPath p;
          p.vertices = std::move(*got);
          for (size_t t2 = 1; t2 + 1 < p.vertices.size(); ++t2) z_avail.erase(p.vertices[t2]);
          head_paths[c].push_back(std::move(p));
          from = to;
        }
      }
      if (!ok) {
        last_fail = "head segment routing failed";
        last_phase = CoverPhase::endgame;
        continue;
      }

      // final segments: connect until exactly s remain
      std::vector<ExactPath> tail_paths(chains);
      std::vector<char> connected(chains, 0);
      int need = chains - s;
      int got_count = 0;
      for (int c = 0; c < chains && got_count < need; ++c) {
        int from = nseg > 1 ? marks[c].back() : pairs[3 * r + c].first;
        int to = pairs[3 * r + c].second;
        auto got = find_path_exact(g, from, to, sigma_b, z_avail, rng, cfg.weave.search_budget);
        if (!got) continue;
        tail_paths[c].vertices = std::move(*got);
        for (size_t t2 = 1; t2 + 1 < tail_paths[c].vertices.size(); ++t2) {
          z_avail.erase(tail_paths[c].vertices[t2]);
        }
        connected[c] = 1;
        ++got_count;
      }
      if (got_count < need) {
        last_fail = "not enough tail segments connected";
        last_phase = CoverPhase::endgame;
        continue;
      }
      std::vector<int> straggler;
      for (int c = 0; c < chains; ++c) {
        if (!connected[c]) straggler.push_back(c);
      }
      std::vector<int> z3 = z_avail.to_vector();
      if (static_cast<int>(z3.size()) != s) throw Error("cover: leftover accounting broke");

      // endgame: rescue each straggler through one leftover vertex and the
      // flexible set
      VertexSet a_avail = a_set;
      int lam1 = sigma_b == 4 ? 1 : (sigma_b - 2) / 2;
      int lam2 = sigma_b - 2 - lam1;
      ok = true;
      for (int si = 0; si < s && ok; ++si) {
        int c = straggler[si];
        int m_v = plan.segs.size() > 1 ? marks[c].back() : pairs[3 * r + c].first;
        int y_v = pairs[3 * r + c].second;
        int e_v = z3[si];
        // e' reaches back toward m, e'' forward toward y
        std::vector<int> cand1, cand2;
        a_avail.for_each([&](int u) {
          bool near_e = g.has_edge(u, e_v);
          if (!near_e) return;
          if (lam1 == 1 ? g.has_edge(m_v, u) : true) cand1.push_back(u);
          if (lam2 == 1 ? g.has_edge(u, y_v) : true) cand2.push_back(u);
        });
        rng.shuffle(cand1);
        rng.shuffle(cand2);
        int e1 = cand1.empty() ? -1 : cand1[0];
        int e2 = -1;
        for (int u : cand2) {
          if (u != e1) {
            e2 = u;
            break;
          }
        }
        if (e1 < 0 || e2 < 0) {
          ok = false;
          break;
        }
        a_avail.erase(e1);
        a_avail.erase(e2);
        std::vector<int> full{m_v};
        if (lam1 == 1) {
          full.push_back(e1);
        } else {
          auto leg = find_path_exact(g, m_v, e1, lam1, a_avail, rng, cfg.weave.search_budget);
          if (!leg) {
            ok = false;
            break;
          }
          for (size_t t2 = 1; t2 < leg->size(); ++t2) {
            full.push_back((*leg)[t2]);
            if (t2 + 1 < leg->size()) a_avail.erase((*leg)[t2]);
          }
        }
        full.push_back(e_v);
        full.push_back(e2);
        if (lam2 == 1) {
          full.push_back(y_v);
        } else {
          auto leg = find_path_exact(g, e2, y_v, lam2, a_avail, rng, cfg.weave.search_budget);
          if (!leg) {
            ok = false;
            break;
          }
          for (size_t t2 = 1; t2 < leg->size(); ++t2) {
            full.push_back((*leg)[t2]);
            if (t2 + 1 < leg->size()) a_avail.erase((*leg)[t2]);
          }
        }
        tail_paths[c].vertices = std::move(full);
        if (tail_paths[c].length() != sigma_b || !validate_path(g, tail_paths[c])) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        last_fail = "endgame detour failed";
        last_phase = CoverPhase::endgame;
        continue;
      }
      if (a_avail.count() != r) throw Error("cover: flexible-set accounting broke");

      std::vector<ExactPath> absorbed;
      try {
        absorbed = absorb(g, st, a_avail);
      } catch (const Error& e) {
        last_fail = e.what();
        last_phase = CoverPhase::absorb;
        continue;
      }

      std::vector<ExactPath> out(q);
      for (int j = 0; j < 3 * r; ++j) out[j] = absorbed[j];
      for (int c = 0; c < chains; ++c) {
        ExactPath full;
        full.vertices.push_back(pairs[3 * r + c].first);
        for (const auto& hp : head_paths[c]) {
          full.vertices.insert(full.vertices.end(), hp.vertices.begin() + 1, hp.vertices.end());
        }
        full.vertices.insert(full.vertices.end(), tail_paths[c].vertices.begin() + 1,
                             tail_paths[c].vertices.end());
        out[3 * r + c] = std::move(full);
      }
      check_partition(g, pairs, l, out);
      return out;
    } catch (const CoverFailed&) {
      throw;
    } catch (const Error& e) {
      last_fail = e.what();
    }
  }
  throw CoverFailed("cover: retries exhausted (" + last_fail + ")", last_phase);
}

namespace {

std::optional<std::vector<int>> forward_path(const DiGraph& g, int x, int y, int k,
                                             const VertexSet& avail, Rng& rng, long long budget) {
  return find_path_exact_directed(g, x, y, std::vector<int8_t>(k, 1), avail, rng, budget);
}

bool small_cover_rec_directed(const DiGraph& g, const std::vector<std::pair<int, int>>& pairs, int l,
                              size_t at, VertexSet& free, std::vector<ExactPath>& acc) {
  if (at == pairs.size()) return free.empty();
  auto [x, y] = pairs[at];
  std::vector<int> path{x};
  VertexSet on(g.size());
  on.insert(x);
  std::function<bool(int, int)> dfs = [&](int v, int rem) -> bool {
    if (rem == 1) {
      if (!g.has_arc(v, y)) return false;
      path.push_back(y);
      ExactPath p;
      p.vertices = path;
      acc.push_back(p);
      if (small_cover_rec_directed(g, pairs, l, at + 1, free, acc)) return true;
      acc.pop_back();
      path.pop_back();
      return false;
    }
    for (int u : g.out_neighbors(v)) {
      if (u == y || !free.contains(u) || on.contains(u)) continue;
      path.push_back(u);
      on.insert(u);
      free.erase(u);
      if (dfs(u, rem - 1)) return true;
      free.insert(u);
      on.erase(u);
      path.pop_back();
    }
    return false;
  };
  return dfs(x, l - 1);
}

void check_partition_directed(const DiGraph& g, const std::vector<std::pair<int, int>>& pairs, int l,
                              const std::vector<ExactPath>& paths) {
  if (paths.size() != pairs.size()) throw Error("cover: wrong path count");
  VertexSet seen(g.size());
  for (size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].length() != l - 1) throw Error("cover: wrong path length");
    if (paths[i].front() != pairs[i].first || paths[i].back() != pairs[i].second) {
      throw Error("cover: wrong endpoints");
    }
    std::vector<int8_t> fwd(paths[i].vertices.size() - 1, 1);
    if (!validate_path_directed(g, paths[i], fwd)) throw Error("cover: not a directed path");
    for (int v : paths[i].vertices) {
      if (seen.contains(v)) throw Error("cover: paths overlap");
      seen.insert(v);
    }
  }
  if (seen.count() != g.size()) throw Error("cover: not a partition of V");
}

}  // namespace

std::vector<ExactPath> cover_with_paths_directed(const DiGraph& g,
                                                 const std::vector<std::pair<int, int>>& pairs,
                                                 int l, const DirectedCoverConfig& cfg, RngSeed seed) {
  const int n = g.size();
  VertexSet endpoints(n);
  for (auto [x, y] : pairs) {
    if (x == y || endpoints.contains(x) || endpoints.contains(y)) {
      throw InvalidArgument("cover_with_paths_directed: endpoints must be distinct");
    }
    endpoints.insert(x);
    endpoints.insert(y);
  }
  CoverConfig probe;  // reuse the undirected planner
  probe.sigma_b = cfg.sigma_b;
  probe.sigma_a = cfg.sigma_a;
  probe.stragglers = cfg.stragglers;
  CoverPlan plan = make_plan(n, l, pairs.size(), probe);

  if (cfg.verify_expansion) {
    ExpansionParams p;
    p.d = 2.0;
    p.target = VertexSet::full(n) - endpoints;
    ExpansionReport rep = check_expands_into_directed(g, p, cfg.verify_budget, seed.child(91));
    if (!rep.holds) throw CoverFailed("cover: host fails the sampled expansion check", CoverPhase::reduction);
  }

  if (n <= cfg.small_n) {
    VertexSet free = VertexSet::full(n) - endpoints;
    std::vector<ExactPath> acc;
    if (small_cover_rec_directed(g, pairs, l, 0, free, acc)) {
      check_partition_directed(g, pairs, l, acc);
      return acc;
    }
    throw CoverFailed("cover: exhaustive search found no partition", CoverPhase::endgame);
  }

  const int q = plan.q, s = plan.s, r = plan.r;
  const int sigma_b = cfg.sigma_b;
  std::string last_fail = "?";
  CoverPhase last_phase = CoverPhase::reduction;

  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    RngSeed aseed = seed.child(attempt + 1);
    Rng rng(aseed.child(0));
    try {
      VertexSet w_all = VertexSet::full(n) - endpoints;
      std::vector<int> wlist = w_all.to_vector();
      rng.shuffle(wlist);
      VertexSet a_set(n);
      for (int i = 0; i < 2 * r; ++i) a_set.insert(wlist[i]);
      VertexSet w_str = w_all - a_set;

      std::vector<int> xs, ys;
      for (int j = 0; j < 3 * r; ++j) {
        xs.push_back(pairs[j].first);
        ys.push_back(pairs[j].second);
      }
      DirectedAbsorbingStructure st;
      try {
        st = build_absorbing_structure_directed(g, a_set, w_str, xs, ys, l, cfg.structure,
                                                aseed.child(1));
      } catch (const Error& e) {
        last_fail = e.what();
        last_phase = CoverPhase::absorber_build;
        continue;
      }

      VertexSet z_avail = w_str - st.w_prime;
      const std::vector<int>& segs = plan.segs;
      int nseg = static_cast<int>(segs.size());
      int chains = q - 3 * r;
      std::vector<std::vector<int>> marks(chains);
      {
        std::vector<int> zlist = z_avail.to_vector();
        rng.shuffle(zlist);
        size_t at = 0;
        for (int c = 0; c < chains; ++c) {
          for (int j = 0; j + 1 < nseg; ++j) {
            if (at >= zlist.size()) throw CoverFailed("cover: ran out of label vertices", CoverPhase::endgame);
            marks[c].push_back(zlist[at++]);
          }
        }
        for (int c = 0; c < chains; ++c) {
          for (int v : marks[c]) z_avail.erase(v);
        }
      }

      std::vector<std::vector<ExactPath>> head_paths(chains);
      bool ok = true;
      for (int c = 0; c < chains && ok; ++c) {
        int from = pairs[3 * r + c].first;
        for (int j = 0; j + 1 < nseg; ++j) {
          int to = marks[c][j];
          auto got = forward_path(g, from, to, segs[j], z_avail, rng, cfg.weave.search_budget);
          if (!got) {
            ok = false;
            break;
          }
          ExactPath p;
          p.vertices = std::move(*got);
          for (size_t t2 = 1; t2 + 1 < p.vertices.size(); ++t2) z_avail.erase(p.vertices[t2]);
          head_paths[c].push_back(std::move(p));
          from = to;
        }
      }
      if (!ok) {
        last_fail = "head segment routing failed";
        last_phase = CoverPhase::endgame;
        continue;
      }

      std::vector<ExactPath> tail_paths(chains);
      std::vector<char> connected(chains, 0);
      int need = chains - s;
      int got_count = 0;
      for (int c = 0; c < chains && got_count < need; ++c) {
        int from = nseg > 1 ? marks[c].back() : pairs[3 * r + c].first;
        int to = pairs[3 * r + c].second;
        auto got = forward_path(g, from, to, sigma_b, z_avail, rng, cfg.weave.search_budget);
        if (!got) continue;
        tail_paths[c].vertices = std::move(*got);
        for (size_t t2 = 1; t2 + 1 < tail_paths[c].vertices.size(); ++t2) {
          z_avail.erase(tail_paths[c].vertices[t2]);
        }
        connected[c] = 1;
        ++got_count;
      }
      if (got_count < need) {
        last_fail = "not enough tail segments connected";
        last_phase = CoverPhase::endgame;
        continue;
      }
      std::vector<int> straggler;
      for (int c = 0; c < chains; ++c) {
        if (!connected[c]) straggler.push_back(c);
      }
      std::vector<int> z3 = z_avail.to_vector();
      if (static_cast<int>(z3.size()) != s) throw Error("cover: leftover accounting broke");

      VertexSet a_avail = a_set;
      int lam1 = sigma_b == 4 ? 1 : (sigma_b - 2) / 2;
      int lam2 = sigma_b - 2 - lam1;
      ok = true;
      for (int si = 0; si < s && ok; ++si) {
        int c = straggler[si];
        int m_v = nseg > 1 ? marks[c].back() : pairs[3 * r + c].first;
        int y_v = pairs[3 * r + c].second;
        int e_v = z3[si];
        std::vector<int> cand1, cand2;
        a_avail.for_each([&](int u) {
          if (g.has_arc(u, e_v) && (lam1 == 1 ? g.has_arc(m_v, u) : true)) cand1.push_back(u);
          if (g.has_arc(e_v, u) && (lam2 == 1 ? g.has_arc(u, y_v) : true)) cand2.push_back(u);
        });
        rng.shuffle(cand1);
        rng.shuffle(cand2);
        int e1 = cand1.empty() ? -1 : cand1[0];
        int e2 = -1;
        for (int u : cand2) {
          if (u != e1) {
            e2 = u;
            break;
          }
        }
        if (e1 < 0 || e2 < 0) {
          ok = false;
          break;
        }
        a_avail.erase(e1);
        a_avail.erase(e2);
        std::vector<int> full{m_v};
        if (lam1 == 1) {
          full.push_back(e1);
        } else {
          auto leg = forward_path(g, m_v, e1, lam1, a_avail, rng, cfg.weave.search_budget);
          if (!leg) {
            ok = false;
            break;
          }
          for (size_t t2 = 1; t2 < leg->size(); ++t2) {
            full.push_back((*leg)[t2]);
            if (t2 + 1 < leg->size()) a_avail.erase((*leg)[t2]);
          }
        }
        full.push_back(e_v);
        full.push_back(e2);
        if (lam2 == 1) {
          full.push_back(y_v);
        } else {
          auto leg = forward_path(g, e2, y_v, lam2, a_avail, rng, cfg.weave.search_budget);
          if (!leg) {
            ok = false;
            break;
          }
          for (size_t t2 = 1; t2 < leg->size(); ++t2) {
            full.push_back((*leg)[t2]);
            if (t2 + 1 < leg->size()) a_avail.erase((*leg)[t2]);
          }
        }
        tail_paths[c].vertices = std::move(full);
        std::vector<int8_t> fwd(sigma_b, 1);
        if (tail_paths[c].length() != sigma_b || !validate_path_directed(g, tail_paths[c], fwd)) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        last_fail = "endgame detour failed";
        last_phase = CoverPhase::endgame;
        continue;
      }
      if (a_avail.count() != r) throw Error("cover: flexible-set accounting broke");

      std::vector<ExactPath> absorbed;
      try {
        absorbed = absorb_directed(g, st, a_avail);
      } catch (const Error& e) {
        last_fail = e.what();
        last_phase = CoverPhase::absorb;
        continue;
      }

      std::vector<ExactPath> out(q);
      for (int j = 0; j < 3 * r; ++j) out[j] = absorbed[j];
      for (int c = 0; c < chains; ++c) {
        ExactPath full;
        full.vertices.push_back(pairs[3 * r + c].first);
        for (const auto& hp : head_paths[c]) {
          full.vertices.insert(full.vertices.end(), hp.vertices.begin() + 1, hp.vertices.end());
        }
        full.vertices.insert(full.vertices.end(), tail_paths[c].vertices.begin() + 1,
                             tail_paths[c].vertices.end());
        out[3 * r + c] = std::move(full);
      }
      check_partition_directed(g, pairs, l, out);
      return out;
    } catch (const CoverFailed&) {
      throw;
    } catch (const Error& e) {
      last_fail = e.what();
    }
  }
  throw CoverFailed("cover: retries exhausted (" + last_fail + ")", last_phase);
}

}  // namespace tw
