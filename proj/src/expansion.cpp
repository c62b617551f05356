#include "treeweave/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treeweave/errors.hpp"

namespace tw {

namespace {

int ceil_div_real(int a, double d) {  // ceil(a / (2d)) with real d
  return static_cast<int>(std::ceil(static_cast<double>(a) / (2.0 * d)));
}

// Saturating count of subsets to enumerate for the exhaustive mode.
long long count_condition1(int n, int cut, long long cap) {
  long long total = 0;
  for (int s = 1; s < cut; ++s) {
    double c = 1.0;
    for (int i = 0; i < s; ++i) c *= static_cast<double>(n - i) / (i + 1);
    if (c > static_cast<double>(cap) || (total += static_cast<long long>(c)) > cap) return cap + 1;
  }
  return total;
}

// Condition 2 only needs one pass over the X sets: some size-cut Y avoids
// N(X) entirely iff at least cut vertices lie outside X and N(X).
long long count_condition2(int n, int cut, long long cap) {
  if (2 * cut > n) return 0;
  double cx = 1.0;
  for (int i = 0; i < cut; ++i) cx *= static_cast<double>(n - i) / (i + 1);
  if (cx > static_cast<double>(cap)) return cap + 1;
  return static_cast<long long>(cx);
}

template <class F>
bool for_each_combination(int n, int k, F f) {  // f returns true to stop
  if (k > n || k <= 0) return false;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (f(idx)) return true;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

struct Checker {
  const Graph& g;
  const VertexSet& w;
  double d;
  int cut;
  long long checked = 0;

  bool violates1(const VertexSet& x) {
    ++checked;
    return static_cast<double>(neighborhood(g, x, w).count()) <
           d * static_cast<double>(x.count()) - 1e-12;
  }
  bool violates2(const VertexSet& x, const VertexSet& y) {
    ++checked;
    return edges_between(g, x, y) == 0;
  }
};

}  // namespace

std::string ExpansionReport::to_text() const {
  std::ostringstream os;
  os << "holds: " << (holds ? "true" : "false") << '\n';
  os << "mode: " << (mode == CheckMode::exhaustive ? "exhaustive" : "sampled") << '\n';
  os << "sets_checked: " << sets_checked << '\n';
  if (witness) {
    os << "witness_x:";
    for (int v : witness->x.to_vector()) os << ' ' << v;
    os << '\n';
    if (witness->y) {
      os << "witness_y:";
      for (int v : witness->y->to_vector()) os << ' ' << v;
      os << '\n';
    }
  }
  return os.str();
}

ExpansionReport check_expands_into(const Graph& g, const ExpansionParams& params, CheckMode mode,
                                   long long budget, RngSeed seed, const CheckConfig& cfg) {
  if (params.d <= 0.0) throw InvalidArgument("check_expands_into: d must be positive");
  int n = g.size();
  VertexSet w = params.target ? *params.target : VertexSet::full(n);
  if (w.universe() != n) throw InvalidArgument("check_expands_into: target universe mismatch");
  int wsize = w.count();
  int cut = ceil_div_real(wsize, params.d);

  Checker chk{g, w, params.d, cut};
  ExpansionReport rep;
  rep.mode = mode;

  auto fail1 = [&](const VertexSet& x) {
    rep.holds = false;
    rep.witness = ExpansionWitness{x, std::nullopt};
    rep.sets_checked = chk.checked;
    return rep;
  };
  auto fail2 = [&](const VertexSet& x, const VertexSet& y) {
    rep.holds = false;
    rep.witness = ExpansionWitness{x, y};
    rep.sets_checked = chk.checked;
    return rep;
  };

  if (mode == CheckMode::exhaustive) {
    long long c1 = count_condition1(n, cut, cfg.exhaustive_cap);
    long long c2 = count_condition2(n, cut, cfg.exhaustive_cap);
    if (c1 > cfg.exhaustive_cap || c2 > cfg.exhaustive_cap || c1 + c2 > cfg.exhaustive_cap) {
      throw InvalidArgument("check: exhaustive enumeration exceeds the configured cap");
    }
    for (int s = 1; s < cut; ++s) {
      VertexSet found(n);
      bool stop = for_each_combination(n, s, [&](const std::vector<int>& idx) {
        VertexSet x = VertexSet::from_vector(n, idx);
        if (chk.violates1(x)) {
          found = x;
          return true;
        }
        return false;
      });
      if (stop) return fail1(found);
    }
    if (2 * cut <= n) {
      VertexSet fx(n), fy(n);
      bool stop = for_each_combination(n, cut, [&](const std::vector<int>& xi) {
        ++chk.checked;
        VertexSet x = VertexSet::from_vector(n, xi);
        VertexSet untouched = VertexSet::full(n) - x - neighborhood(g, x);
        if (untouched.count() >= cut) {
          fx = x;
          fy = VertexSet(n);
          int take = 0;
          untouched.for_each([&](int v) {
            if (take < cut) {
              fy.insert(v);
              ++take;
            }
          });
          return true;
        }
        return false;
      });
      if (stop) return fail2(fx, fy);
    }
    rep.holds = true;
    rep.sets_checked = chk.checked;
    return rep;
  }

  // sampled mode
  Rng rng(seed);
  // sweep: all sets of size <= 3 on small universes, singletons always
  int sweep_max = (n <= cfg.sweep_limit) ? 3 : 1;
  for (int s = 1; s <= std::min(sweep_max, cut - 1); ++s) {
    VertexSet found(n);
    bool stop = for_each_combination(n, s, [&](const std::vector<int>& idx) {
      VertexSet x = VertexSet::from_vector(n, idx);
      if (chk.violates1(x)) {
        found = x;
        return true;
      }
      return false;
    });
    if (stop) return fail1(found);
  }
  // BFS-ball seeds: low-expansion sets tend to be localized
  if (cut > 1) {
    VertexSet full = VertexSet::full(n);
    for (int v = 0; v < n; ++v) {
      std::vector<int> dist = bfs_distances(g, v, full);
      for (int r = 1; r <= cfg.ball_radius; ++r) {
        VertexSet ball(n);
        int size = 0;
        for (int u = 0; u < n; ++u) {
          if (dist[u] >= 0 && dist[u] <= r) {
            ball.insert(u);
            ++size;
          }
        }
        if (size >= 1 && size < cut) {
          if (chk.violates1(ball)) return fail1(ball);
        } else {
          break;
        }
      }
    }
  }
  // random candidate sets, condition 1
  for (long long it = 0; it < budget && cut > 1; ++it) {
    int s = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(cut - 1)));
    VertexSet x = VertexSet::from_vector(n, rng.sample_without_replacement(n, s));
    if (chk.violates1(x)) return fail1(x);
  }
  // random disjoint pairs, condition 2
  if (2 * cut <= n) {
    for (long long it = 0; it < budget; ++it) {
      std::vector<int> pick = rng.sample_without_replacement(n, 2 * cut);
      VertexSet x(n), y(n);
      for (int i = 0; i < cut; ++i) x.insert(pick[i]);
      for (int i = cut; i < 2 * cut; ++i) y.insert(pick[i]);
      if (chk.violates2(x, y)) return fail2(x, y);
    }
  }
  rep.holds = true;
  rep.sets_checked = chk.checked;
  return rep;
}

ExpansionReport check_expander(const Graph& g, double d, CheckMode mode, long long budget,
                               RngSeed seed, const CheckConfig& cfg) {
  ExpansionParams params;
  params.d = d;
  return check_expands_into(g, params, mode, budget, seed, cfg);
}

ExpansionReport check_expands_into_directed(const DiGraph& g, const ExpansionParams& params,
                                            long long budget, RngSeed seed, const CheckConfig& cfg) {
  if (params.d <= 0.0) throw InvalidArgument("check_expands_into_directed: d must be positive");
  int n = g.size();
  VertexSet w = params.target ? *params.target : VertexSet::full(n);
  int cut = ceil_div_real(w.count(), params.d);
  ExpansionReport rep;
  rep.mode = CheckMode::sampled;
  Rng rng(seed);
  long long checked = 0;

  auto violates1 = [&](const VertexSet& x) {
    ++checked;
    double need = params.d * static_cast<double>(x.count()) - 1e-12;
    return static_cast<double>(out_neighborhood(g, x, w).count()) < need ||
           static_cast<double>(in_neighborhood(g, x, w).count()) < need;
  };
  auto arc_between = [&](const VertexSet& x, const VertexSet& y) {
    ++checked;
    bool found = false;
    x.for_each([&](int v) {
      if (found) return;
      for (int u : g.out_neighbors(v)) {
        if (y.contains(u)) {
          found = true;
          return;
        }
      }
    });
    return found;
  };

  for (int v = 0; v < n && cut > 1; ++v) {
    VertexSet x(n);
    x.insert(v);
    if (violates1(x)) {
      rep.witness = ExpansionWitness{x, std::nullopt};
      rep.sets_checked = checked;
      return rep;
    }
  }
  for (long long it = 0; it < budget && cut > 1; ++it) {
    int s = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(cut - 1)));
    VertexSet x = VertexSet::from_vector(n, rng.sample_without_replacement(n, s));
    if (violates1(x)) {
      rep.witness = ExpansionWitness{x, std::nullopt};
      rep.sets_checked = checked;
      return rep;
    }
  }
  if (2 * cut <= n) {
    for (long long it = 0; it < budget; ++it) {
      std::vector<int> pick = rng.sample_without_replacement(n, 2 * cut);
      VertexSet x(n), y(n);
      for (int i = 0; i < cut; ++i) x.insert(pick[i]);
      for (int i = cut; i < 2 * cut; ++i) y.insert(pick[i]);
      if (!arc_between(x, y)) {
        rep.witness = ExpansionWitness{x, y};
        rep.sets_checked = checked;
        return rep;
      }
      if (!arc_between(y, x)) {
        rep.witness = ExpansionWitness{y, x};
        rep.sets_checked = checked;
        return rep;
      }
    }
  }
  rep.holds = true;
  rep.sets_checked = checked;
  return rep;
}

namespace {

template <class VerifyPart>
std::vector<VertexSet> split_target_impl(int n, const VertexSet& w, const std::vector<int>& sizes,
                                         double d, RngSeed seed, const SplitConfig& cfg,
                                         VerifyPart verify_part) {
  int wsize = w.count();
  long long total = 0;
  for (int s : sizes) {
    if (s < 0) throw InvalidArgument("split_target: negative part size");
    total += s;
  }
  if (total != wsize) throw InvalidArgument("split_target: sizes must sum to |W|");
  int k = static_cast<int>(sizes.size());
  if (k == 0) throw InvalidArgument("split_target: no parts requested");
  if (cfg.enforce_k_cap && n >= 3 && k > std::max(1.0, std::log(static_cast<double>(n)))) {
    throw InvalidArgument("split_target: more parts than log n");
  }
  for (int s : sizes) {
    double di = (static_cast<double>(s) / (5.0 * wsize)) * d;
    if (di < cfg.d_floor) throw InvalidArgument("split_target: derived d_i below the configured floor");
  }

  std::vector<int> members = w.to_vector();
  std::string last_fail = "no attempt";
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Rng rng(seed.child(attempt));
    rng.shuffle(members);
    std::vector<VertexSet> parts;
    parts.reserve(k);
    size_t at = 0;
    for (int i = 0; i < k; ++i) {
      VertexSet part(n);
      for (int j = 0; j < sizes[i]; ++j) part.insert(members[at++]);
      parts.push_back(std::move(part));
    }
    if (cfg.verify_budget <= 0) return parts;
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      double di = (static_cast<double>(sizes[i]) / (5.0 * wsize)) * d;
      ExpansionReport r = verify_part(parts[i], di, seed.child(attempt).child(i + 1));
      if (!r.holds) {
        ok = false;
        last_fail = "part " + std::to_string(i) + " failed:\n" + r.to_text();
      }
    }
    if (ok) return parts;
  }
  throw RetriesExhausted("split_target: no verified partition found; last failure: " + last_fail);
}

}  // namespace

std::vector<VertexSet> split_target(const Graph& g, const VertexSet& w, const std::vector<int>& sizes,
                                    double d, RngSeed seed, const SplitConfig& cfg) {
  return split_target_impl(g.size(), w, sizes, d, seed, cfg,
                           [&](const VertexSet& part, double di, RngSeed s) {
                             ExpansionParams p;
                             p.d = di;
                             p.target = part;
                             return check_expands_into(g, p, CheckMode::sampled, cfg.verify_budget, s);
                           });
}

std::vector<VertexSet> split_target_directed(const DiGraph& g, const VertexSet& w,
                                             const std::vector<int>& sizes, double d, RngSeed seed,
                                             const SplitConfig& cfg) {
  return split_target_impl(g.size(), w, sizes, d, seed, cfg,
                           [&](const VertexSet& part, double di, RngSeed s) {
                             ExpansionParams p;
                             p.d = di;
                             p.target = part;
                             return check_expands_into_directed(g, p, cfg.verify_budget, s);
                           });
}

double verify_random_expansion_at(int n, double d, double p, int trials, RngSeed seed,
                                  long long budget) {
  if (d < 3.0) throw InvalidArgument("verify_random_expansion: d must be >= 3");
  if (trials < 1) throw InvalidArgument("verify_random_expansion: trials must be >= 1");
  int pass = 0;
  for (int t = 0; t < trials; ++t) {
    Graph g = gen_gnp(n, p, seed.child(t));
    ExpansionReport r = check_expander(g, d, CheckMode::sampled, budget, seed.child(t).child(1));
    if (r.holds) ++pass;
  }
  return static_cast<double>(pass) / trials;
}

double verify_random_expansion(int n, double d, int trials, RngSeed seed, long long budget) {
  double p = std::min(1.0, 7.0 * d * std::log(static_cast<double>(n)) / n);
  return verify_random_expansion_at(n, d, p, trials, seed, budget);
}

}  // namespace tw
