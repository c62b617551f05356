#include "treeweave/absorber.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "treeweave/embed.hpp"
#include "treeweave/errors.hpp"
#include "treeweave/expansion.hpp"
#include "treeweave/matching.hpp"

namespace tw {

namespace {

// Spine labels of one gadget: q = x0 x1..xk y0 yk..y1.
struct SpineLabels {
  int x0, y0;
  std::vector<int> xs, ys;  // 1-based: xs[i], ys[i]

  explicit SpineLabels(const std::vector<int>& q, int k) : xs(k + 1, -1), ys(k + 1, -1) {
    x0 = q[0];
    for (int i = 1; i <= k; ++i) xs[i] = q[i];
    y0 = q[k + 1];
    for (int i = 1; i <= k; ++i) ys[i] = q[2 * k + 2 - i];
  }
};

// Both witness traversals share one alternation rule: the skip path walks the
// internal paths forward on odd indices, the absorb path on even indices.
template <class Traverse>
std::vector<int> assemble_witness(const SpineLabels& sp, int k, bool absorb, int v,
                                  Traverse traverse) {
  std::vector<int> seq{sp.x0};
  if (absorb) seq.push_back(v);
  for (int i = 1; i <= k; ++i) {
    bool forward = absorb ? (i % 2 == 0) : (i % 2 == 1);
    traverse(i, forward, seq);
  }
  seq.push_back(sp.y0);
  return seq;
}

VertexSet path_set(int n, const std::vector<int>& vs) {
  VertexSet s(n);
  for (int v : vs) s.insert(v);
  return s;
}

}  // namespace

bool validate_absorber(const Graph& g, const Absorber& a) {
  if (a.r == a.s || a.r < 0 || a.s < 0 || a.absorbable < 0) return false;
  if (!a.r_set.contains(a.r) || !a.r_set.contains(a.s)) return false;
  if (a.r_set.contains(a.absorbable)) return false;
  if (!validate_path(g, a.skip_path) || !validate_path(g, a.absorb_path)) return false;
  if (a.skip_path.front() != a.r || a.skip_path.back() != a.s) return false;
  if (a.absorb_path.front() != a.r || a.absorb_path.back() != a.s) return false;
  VertexSet skip_vs = path_set(g.size(), a.skip_path.vertices);
  VertexSet abs_vs = path_set(g.size(), a.absorb_path.vertices);
  VertexSet with_v = a.r_set;
  with_v.insert(a.absorbable);
  return skip_vs == a.r_set && abs_vs == with_v;
}

Absorber merge_absorbers(const Graph& g, const Absorber& a, const Absorber& b, const ExactPath& link) {
  if (link.front() != a.s || link.back() != b.r) throw InvalidArgument("merge_absorbers: link must run a.s -> b.r");
  if (!validate_path(g, link)) throw InvalidArgument("merge_absorbers: bad link path");
  for (size_t i = 1; i + 1 < link.vertices.size(); ++i) {
    int v = link.vertices[i];
    if (a.r_set.contains(v) || b.r_set.contains(v) || v == a.absorbable || v == b.absorbable) {
      throw InvalidArgument("merge_absorbers: link interior collides");
    }
  }
  if (a.r_set.intersects(b.r_set)) throw InvalidArgument("merge_absorbers: absorbers overlap");
  Absorber out;
  out.r = a.r;
  out.s = b.s;
  out.absorbable = a.absorbable;
  out.r_set = a.r_set | b.r_set;
  for (size_t i = 1; i + 1 < link.vertices.size(); ++i) out.r_set.insert(link.vertices[i]);
  auto splice = [&](const ExactPath& left, const ExactPath& right) {
    ExactPath p;
    p.vertices = left.vertices;
    p.vertices.insert(p.vertices.end(), link.vertices.begin() + 1, link.vertices.end());
    p.vertices.insert(p.vertices.end(), right.vertices.begin() + 1, right.vertices.end());
    return p;
  };
  out.skip_path = splice(a.skip_path, b.skip_path);
  out.absorb_path = splice(a.absorb_path, b.skip_path);
  return out;
}

std::vector<Absorber> build_absorbers(const Graph& g, const std::vector<AbsorberAnchors>& anchors,
                                      const VertexSet& w_spine, const VertexSet& w_paths,
                                      const AbsorberShape& shape, const WeaveConfig& weave,
                                      RngSeed seed) {
  if (shape.k_paths < 1 || shape.p_len < 2) throw InvalidArgument("build_absorbers: bad shape");
  int k = shape.k_paths;
  for (const auto& an : anchors) {
    if (!g.has_edge(an.v, an.x0) || !g.has_edge(an.v, an.y1)) {
      throw InvalidArgument("build_absorbers: vertex not adjacent to both anchors");
    }
  }
  std::vector<PathRequest> qreq;
  qreq.reserve(anchors.size());
  for (const auto& an : anchors) qreq.push_back(PathRequest{an.x0, an.y1, shape.spine_len(), {}});
  std::vector<ExactPath> spines = connect_pairs_exact(g, qreq, w_spine, weave, seed.child(1));

  std::vector<PathRequest> preq;
  std::vector<SpineLabels> labels;
  labels.reserve(anchors.size());
  for (size_t a = 0; a < anchors.size(); ++a) {
    labels.emplace_back(spines[a].vertices, k);
    for (int i = 1; i <= k; ++i) {
      preq.push_back(PathRequest{labels[a].xs[i], labels[a].ys[i], shape.p_len, {}});
    }
  }
  std::vector<ExactPath> inner = connect_pairs_exact(g, preq, w_paths, weave, seed.child(2));

  std::vector<Absorber> out;
  out.reserve(anchors.size());
  for (size_t a = 0; a < anchors.size(); ++a) {
    const SpineLabels& sp = labels[a];
    Absorber ab;
    ab.r = sp.x0;
    ab.s = sp.y0;
    ab.absorbable = anchors[a].v;
    ab.r_set = VertexSet(g.size());
    ab.r_set.insert(sp.x0);
    ab.r_set.insert(sp.y0);
    for (int i = 1; i <= k; ++i) {
      for (int v : inner[a * k + (i - 1)].vertices) ab.r_set.insert(v);
    }
    auto traverse = [&](int i, bool forward, std::vector<int>& seq) {
      const auto& pv = inner[a * k + (i - 1)].vertices;
      if (forward) {
        seq.insert(seq.end(), pv.begin(), pv.end());
      } else {
        seq.insert(seq.end(), pv.rbegin(), pv.rend());
      }
    };
    ab.skip_path.vertices = assemble_witness(sp, k, false, -1, traverse);
    ab.absorb_path.vertices = assemble_witness(sp, k, true, anchors[a].v, traverse);
    if (!validate_absorber(g, ab)) throw Error("build_absorbers: assembled gadget failed validation");
    out.push_back(std::move(ab));
  }
  return out;
}

Absorber build_absorber(const Graph& g, int v, std::pair<int, int> anchor_pair, const VertexSet& w2,
                        const VertexSet& w3, const AbsorberShape& shape, const WeaveConfig& weave,
                        RngSeed seed) {
  std::vector<AbsorberAnchors> one{AbsorberAnchors{v, anchor_pair.first, anchor_pair.second}};
  return build_absorbers(g, one, w2, w3, shape, weave, seed)[0];
}

int FlexTemplate::max_degree() const {
  size_t best = 0;
  std::vector<size_t> slot_deg(2 * m, 0);
  for (const auto& a : adj) {
    best = std::max(best, a.size());
    for (int s : a) slot_deg[s] += 1;
  }
  for (size_t d : slot_deg) best = std::max(best, d);
  return static_cast<int>(best);
}

std::vector<std::vector<int>> FlexTemplate::slot_adj() const {
  std::vector<std::vector<int>> rev(2 * m);
  for (int j = 0; j < n_x; ++j) {
    for (int s : adj[j]) rev[s].push_back(j);
  }
  return rev;
}

namespace {

bool template_matchable(const FlexTemplate& t, const std::vector<int>& z_slots) {
  std::vector<char> alive(2 * t.m, 0);
  for (int s = 0; s < t.m; ++s) alive[s] = 1;
  for (int s : z_slots) alive[s] = 1;
  std::vector<std::vector<int>> cand(t.n_x);
  for (int j = 0; j < t.n_x; ++j) {
    for (int s : t.adj[j]) {
      if (alive[s]) cand[j].push_back(s);
    }
  }
  GenMatchResult res = generalized_matching(2 * t.m, cand, std::vector<int>(t.n_x, 1));
  return res.ok;
}

}  // namespace

FlexTemplate build_flex_template(int n_x, RngSeed seed, TemplateVerify verify,
                                 const TemplateConfig& cfg) {
  if (n_x < 3 || n_x % 3 != 0) throw InvalidArgument("build_flex_template: n_x must be >= 3 and divisible by 3");
  if (cfg.matchings < 1 || cfg.matchings > 20) throw InvalidArgument("build_flex_template: matchings outside [1,20]");
  int m = 2 * n_x / 3;
  if (verify == TemplateVerify::exhaustive) {
    double combos = 1.0;
    for (int i = 0; i < m / 2; ++i) combos *= static_cast<double>(m - i) / (i + 1);
    if (combos > 2e6) throw InvalidArgument("build_flex_template: exhaustive verification too large");
  }

  for (int resample = 0; resample < cfg.max_resamples; ++resample) {
    Rng rng(seed.child(resample));
    FlexTemplate t;
    t.n_x = n_x;
    t.m = m;
    t.adj.assign(n_x, {});
    // union of independent random perfect matchings between X1 and Y
    std::vector<std::vector<char>> has(m, std::vector<char>(m, 0));
    std::vector<int> perm(m);
    for (int round = 0; round < cfg.matchings; ++round) {
      for (int i = 0; i < m; ++i) perm[i] = i;
      rng.shuffle(perm);
      for (int i = 0; i < m; ++i) has[i][perm[i]] = 1;
    }
    for (int i = 0; i < m; ++i) {
      for (int y = 0; y < m; ++y) {
        if (has[i][y]) {
          t.adj[i].push_back(y);      // Y slot
          t.adj[i].push_back(y + m);  // duplicated Z slot
        }
      }
      std::sort(t.adj[i].begin(), t.adj[i].end());
    }
    // duplicate half of X1
    for (int j = 0; j < m / 2; ++j) t.adj[m + j] = t.adj[j];

    bool ok = true;
    if (verify == TemplateVerify::exhaustive) {
      std::vector<int> idx(m / 2);
      for (int i = 0; i < m / 2; ++i) idx[i] = i;
      while (ok) {
        std::vector<int> z;
        for (int i : idx) z.push_back(m + i);
        if (!template_matchable(t, z)) ok = false;
        int i = m / 2 - 1;
        while (i >= 0 && idx[i] == m - m / 2 + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j2 = i + 1; j2 < m / 2; ++j2) idx[j2] = idx[j2 - 1] + 1;
      }
    } else {
      for (int trial = 0; trial < cfg.sample_count && ok; ++trial) {
        std::vector<int> pick = rng.sample_without_replacement(m, m / 2);
        std::vector<int> z;
        z.reserve(m / 2);
        for (int s : pick) z.push_back(m + s);
        if (!template_matchable(t, z)) ok = false;
      }
    }
    if (ok) return t;
  }
  throw ResampleExhausted("build_flex_template: no resilient template within the resample budget");
}

std::vector<int> resilient_match(const FlexTemplate& t, const std::vector<int>& z_slots) {
  if (static_cast<int>(z_slots.size()) != t.n_x / 3) {
    throw InvalidArgument("resilient_match: need exactly n_x/3 Z slots");
  }
  std::vector<char> alive(2 * t.m, 0);
  for (int s = 0; s < t.m; ++s) alive[s] = 1;
  for (int s : z_slots) {
    if (s < t.m || s >= 2 * t.m) throw InvalidArgument("resilient_match: slot outside Z");
    if (alive[s]) throw InvalidArgument("resilient_match: duplicate Z slot");
    alive[s] = 1;
  }
  std::vector<std::vector<int>> cand(t.n_x);
  for (int j = 0; j < t.n_x; ++j) {
    for (int s : t.adj[j]) {
      if (alive[s]) cand[j].push_back(s);
    }
  }
  GenMatchResult res = generalized_matching(2 * t.m, cand, std::vector<int>(t.n_x, 1));
  if (!res.ok) throw NoMatching("resilient_match: template resilience violated", res.deficient);
  std::vector<int> out(t.n_x);
  for (int j = 0; j < t.n_x; ++j) out[j] = res.assignment[j][0];
  return out;
}

namespace {

// Link lengths for one merged absorber: t+1 links, each at least min_link,
// interiors summing to exactly l-3 - t*gadget_size.
std::vector<int> link_lengths(int l, int t, int gadget_size, int min_link) {
  int extra = l - 3 - t * gadget_size;  // total interior vertices across links
  int links = t + 1;
  if (extra < links * (min_link - 1)) {
    throw InvalidArgument("absorbing structure: l too small for the template degree");
  }
  std::vector<int> lam(links, min_link);
  int rem = extra - links * (min_link - 1);
  for (int i = 0; rem > 0; i = (i + 1) % links) {
    ++lam[i];
    --rem;
  }
  return lam;
}

struct SlotLayout {
  std::vector<int> slot_vertex;             // slot id -> host vertex
  std::vector<std::vector<int>> rev;        // slot id -> adjacent j's (sorted)
  long long edges = 0;
};

SlotLayout layout_slots(const FlexTemplate& tpl, const std::vector<int>& a_sorted,
                        const std::vector<int>& b_sorted) {
  SlotLayout lay;
  lay.slot_vertex.resize(2 * tpl.m);
  for (int s = 0; s < tpl.m; ++s) lay.slot_vertex[s] = b_sorted[s];
  for (int s = 0; s < tpl.m; ++s) lay.slot_vertex[tpl.m + s] = a_sorted[s];
  lay.rev = tpl.slot_adj();
  for (const auto& r : lay.rev) lay.edges += static_cast<long long>(r.size());
  return lay;
}

}  // namespace

AbsorbingStructure build_absorbing_structure(const Graph& g, const VertexSet& a, const VertexSet& w,
                                             const std::vector<int>& xs, const std::vector<int>& ys,
                                             int l, const StructureConfig& cfg, RngSeed seed) {
  int n = g.size();
  if (xs.size() != ys.size() || xs.empty() || xs.size() % 3 != 0) {
    throw InvalidArgument("build_absorbing_structure: need 3r endpoint pairs");
  }
  int r = static_cast<int>(xs.size()) / 3;
  if (a.count() != 2 * r) throw InvalidArgument("build_absorbing_structure: |A| must be 2r");
  for (int v : xs) {
    if (w.contains(v) || a.contains(v)) throw InvalidArgument("build_absorbing_structure: endpoint inside W or A");
  }
  for (int v : ys) {
    if (w.contains(v) || a.contains(v)) throw InvalidArgument("build_absorbing_structure: endpoint inside W or A");
  }
  if (a.intersects(w)) throw InvalidArgument("build_absorbing_structure: A and W overlap");

  AbsorbingStructure st;
  st.r = r;
  st.l = l;
  st.tpl = build_flex_template(3 * r, seed.child(1), cfg.tmpl_verify, cfg.tmpl);
  st.a_vertices = a.to_vector();

  // working pools carved out of W
  int k = cfg.shape.k_paths;
  int gsize = cfg.shape.size();
  // per-j budgets first, to size the link pool
  long long link_total = 0;
  for (int j = 0; j < 3 * r; ++j) {
    int t = static_cast<int>(st.tpl.adj[j].size());
    std::vector<int> lam = link_lengths(l, t, gsize, cfg.min_link);
    for (int x : lam) link_total += x;
  }
  long long edge_count = 0;
  for (int j = 0; j < 3 * r; ++j) edge_count += static_cast<long long>(st.tpl.adj[j].size());

  auto sz = [&](double raw) { return static_cast<int>(std::ceil(raw * cfg.pool_slack)); };
  int size_b = 2 * r;
  int size_anchor = sz(2.0 * edge_count);
  int size_spine = sz(static_cast<double>(edge_count) * (2 * k + 1));
  int size_paths = sz(static_cast<double>(edge_count) * k * cfg.shape.p_len);
  int size_link = sz(static_cast<double>(link_total));
  long long need = static_cast<long long>(size_b) + size_anchor + size_spine + size_paths + size_link;
  if (need > w.count()) throw InvalidArgument("build_absorbing_structure: W too small for the requested structure");
  std::vector<int> sizes{size_b, size_anchor, size_spine, size_paths, size_link,
                         w.count() - static_cast<int>(need)};
  SplitConfig scfg;
  scfg.enforce_k_cap = false;
  scfg.verify_budget = cfg.weave.split_verify_budget;
  std::vector<VertexSet> pools = split_target(g, w, sizes, 8.0, seed.child(2), scfg);
  const VertexSet& w_b = pools[0];
  const VertexSet& w_anchor = pools[1];
  const VertexSet& w_spine = pools[2];
  const VertexSet& w_paths = pools[3];
  const VertexSet& w_link = pools[4];

  st.b_vertices = w_b.to_vector();  // sorted by construction
  SlotLayout lay = layout_slots(st.tpl, st.a_vertices, st.b_vertices);

  // two fresh anchors per template edge at each absorbable vertex
  std::vector<int> centers, demands;
  for (int s = 0; s < 2 * st.tpl.m; ++s) {
    if (!lay.rev[s].empty()) {
      centers.push_back(lay.slot_vertex[s]);
      demands.push_back(2 * static_cast<int>(lay.rev[s].size()));
    }
  }
  StarDemand sd{centers, demands, w_anchor};
  std::vector<std::vector<int>> stars = attach_stars(g, sd, seed.child(3));

  // flat gadget list, one per template edge, keyed by (j, slot)
  std::vector<AbsorberAnchors> anchors;
  std::map<std::pair<int, int>, int> gadget_of;
  {
    int ci = 0;
    for (int s = 0; s < 2 * st.tpl.m; ++s) {
      if (lay.rev[s].empty()) continue;
      const std::vector<int>& js = lay.rev[s];
      for (size_t i = 0; i < js.size(); ++i) {
        gadget_of[{js[i], s}] = static_cast<int>(anchors.size());
        anchors.push_back(AbsorberAnchors{lay.slot_vertex[s], stars[ci][2 * i], stars[ci][2 * i + 1]});
      }
      ++ci;
    }
  }
  std::vector<Absorber> gadgets =
      build_absorbers(g, anchors, w_spine, w_paths, cfg.shape, cfg.weave, seed.child(4));

  // chain the gadgets of each index with exact-length links
  std::vector<PathRequest> link_reqs;
  std::vector<std::vector<int>> req_of_j(3 * r);
  for (int j = 0; j < 3 * r; ++j) {
    const auto& slots = st.tpl.adj[j];
    int t = static_cast<int>(slots.size());
    std::vector<int> lam = link_lengths(l, t, gsize, cfg.min_link);
    int prev_end = xs[j];
    for (int i = 0; i <= t; ++i) {
      int next_start = i < t ? gadgets[gadget_of[{j, slots[i]}]].r : ys[j];
      req_of_j[j].push_back(static_cast<int>(link_reqs.size()));
      link_reqs.push_back(PathRequest{prev_end, next_start, lam[i], {}});
      if (i < t) prev_end = gadgets[gadget_of[{j, slots[i]}]].s;
    }
  }
  std::vector<ExactPath> links = connect_pairs_exact(g, link_reqs, w_link, cfg.weave, seed.child(5));

  st.merged.reserve(3 * r);
  st.w_prime = VertexSet(n);
  for (int v : st.b_vertices) st.w_prime.insert(v);
  for (int j = 0; j < 3 * r; ++j) {
    MergedAbsorber ma;
    ma.x = xs[j];
    ma.y = ys[j];
    ma.s_set = VertexSet(n);
    ma.s_set.insert(xs[j]);
    ma.s_set.insert(ys[j]);
    for (int s : st.tpl.adj[j]) {
      const Absorber& gd = gadgets[gadget_of[{j, s}]];
      ma.chain_vs.push_back(lay.slot_vertex[s]);
      ma.gadgets.push_back(gd);
      ma.s_set |= gd.r_set;
    }
    for (int ri : req_of_j[j]) {
      ma.links.push_back(links[ri]);
      for (int v : links[ri].vertices) ma.s_set.insert(v);
    }
    if (ma.s_set.count() != l - 1) throw Error("build_absorbing_structure: |S_j| != l-1");
    VertexSet interior = ma.s_set;
    interior.erase(ma.x);
    interior.erase(ma.y);
    if (interior.intersects(st.w_prime)) throw Error("build_absorbing_structure: merged absorbers overlap");
    st.w_prime |= interior;
    st.merged.push_back(std::move(ma));
  }
  long long expect = 3LL * r * (l - 2) - r;
  if (st.w_prime.count() != expect) throw Error("build_absorbing_structure: |W'| mismatch");
  return st;
}

namespace {

// Witness paths run r..s and each link ends where the next gadget starts, so
// every appended segment drops its first vertex.
template <class MA, class GadgetTraverse>
ExactPath traverse_merged(const MA& ma, int absorb_v, GadgetTraverse traverse) {
  ExactPath p;
  p.vertices.push_back(ma.x);
  for (size_t i = 0; i < ma.gadgets.size(); ++i) {
    const auto& link = ma.links[i].vertices;
    p.vertices.insert(p.vertices.end(), link.begin() + 1, link.end());
    traverse(i, ma.chain_vs[i] == absorb_v, p.vertices);
  }
  const auto& last = ma.links.back().vertices;
  p.vertices.insert(p.vertices.end(), last.begin() + 1, last.end());
  return p;
}

}  // namespace

std::vector<ExactPath> absorb(const Graph& g, const AbsorbingStructure& st, const VertexSet& a_prime) {
  if (a_prime.count() != st.r) throw InvalidArgument("absorb: |A'| must equal r");
  std::vector<int> z_slots;
  for (int i = 0; i < 2 * st.r; ++i) {
    if (a_prime.contains(st.a_vertices[i])) z_slots.push_back(st.tpl.m + i);
  }
  if (static_cast<int>(z_slots.size()) != st.r) throw InvalidArgument("absorb: A' must be a subset of A");
  std::vector<int> match = resilient_match(st.tpl, z_slots);

  std::vector<int> slot_vertex(2 * st.tpl.m);
  for (int s = 0; s < st.tpl.m; ++s) slot_vertex[s] = st.b_vertices[s];
  for (int s = 0; s < st.tpl.m; ++s) slot_vertex[st.tpl.m + s] = st.a_vertices[s];

  std::vector<ExactPath> out;
  out.reserve(st.merged.size());
  VertexSet covered(g.size());
  for (size_t j = 0; j < st.merged.size(); ++j) {
    const MergedAbsorber& ma = st.merged[j];
    int v = slot_vertex[match[j]];
    ExactPath p = traverse_merged(ma, v, [&](size_t i, bool absorb_here, std::vector<int>& seq) {
      const ExactPath& wit = absorb_here ? ma.gadgets[i].absorb_path : ma.gadgets[i].skip_path;
      seq.insert(seq.end(), wit.vertices.begin() + 1, wit.vertices.end());
    });
    if (p.length() != st.l - 1 || p.front() != ma.x || p.back() != ma.y || !validate_path(g, p)) {
      throw Error("absorb: assembled path failed validation");
    }
    for (int pv : p.vertices) {
      if (covered.contains(pv)) throw Error("absorb: paths overlap");
      covered.insert(pv);
    }
    out.push_back(std::move(p));
  }
  // the paths must exactly cover W' u A' plus the pair endpoints
  VertexSet want = st.w_prime | a_prime;
  for (const auto& ma : st.merged) {
    want.insert(ma.x);
    want.insert(ma.y);
  }
  if (!(covered == want)) throw Error("absorb: coverage mismatch");
  return out;
}

// ---- directed counterparts ----

bool validate_reversible_path(const DiGraph& g, const ReversiblePath& p) {
  if (p.forward.vertices.size() != p.backward.vertices.size()) return false;
  std::vector<int8_t> fwd(p.forward.vertices.size() - 1, 1);
  if (!validate_path_directed(g, p.forward, fwd) || !validate_path_directed(g, p.backward, fwd)) {
    return false;
  }
  if (p.forward.front() != p.x || p.forward.back() != p.y) return false;
  if (p.backward.front() != p.y || p.backward.back() != p.x) return false;
  VertexSet fs = path_set(g.size(), p.forward.vertices);
  VertexSet bs = path_set(g.size(), p.backward.vertices);
  return fs == p.all && bs == p.all;
}

ReversiblePath build_reversible_path(const DiGraph& g, int x, int y, const VertexSet& pool,
                                     const ReversibleShape& shape, const WeaveConfig& weave,
                                     RngSeed seed) {
  if (shape.subpaths < 1 || shape.sub_len < 1) throw InvalidArgument("build_reversible_path: bad shape");
  int j = shape.subpaths;
  int n = g.size();
  for (int attempt = 0; attempt < weave.max_retries; ++attempt) {
    Rng rng(seed.child(attempt));
    // segment ends: a_i entered going forward, b_i exited; back-arcs make the
    // reverse traversal possible
    std::vector<int> av(j + 1, -1), bv(j + 1, -1);
    VertexSet taken(n);
    auto pick = [&](std::vector<int> cand) -> int {
      std::vector<int> ok;
      for (int c : cand) {
        if (pool.contains(c) && !taken.contains(c)) ok.push_back(c);
      }
      if (ok.empty()) return -1;
      return ok[rng.below(ok.size())];
    };
    auto common_out = [&](int u, int v2) {
      std::vector<int> cand;
      for (int c : g.out_neighbors(u)) {
        if (g.has_arc(v2, c)) cand.push_back(c);
      }
      return cand;
    };
    auto common_in = [&](int u, int v2) {
      std::vector<int> cand;
      for (int c : g.in_neighbors(u)) {
        if (g.has_arc(c, v2)) cand.push_back(c);
      }
      return cand;
    };
    bool ok = true;
    for (int i = 1; i <= j && ok; ++i) {
      // a_i needs an arc from its predecessor's exit, plus y -> a_j
      std::vector<int> ca;
      if (i == 1) {
        ca = j == 1 ? common_out(x, y) : g.out_neighbors(x);
      } else if (i == j) {
        ca = common_out(bv[i - 1], y);
      } else {
        ca = g.out_neighbors(bv[i - 1]);
      }
      av[i] = pick(ca);
      if (av[i] < 0) {
        ok = false;
        break;
      }
      taken.insert(av[i]);
      // b_i sends arcs to the previous a (or x), plus b_j -> y
      std::vector<int> cb;
      if (i == 1) {
        cb = j == 1 ? common_in(x, y) : g.in_neighbors(x);
      } else if (i == j) {
        cb = common_in(y, av[i - 1]);
      } else {
        cb = g.in_neighbors(av[i - 1]);
      }
      bv[i] = pick(cb);
      if (bv[i] < 0) {
        ok = false;
        break;
      }
      taken.insert(bv[i]);
    }
    if (!ok) continue;

    std::vector<PathRequest> reqs;
    for (int i = 1; i <= j; ++i) {
      reqs.push_back(PathRequest{av[i], bv[i], shape.sub_len, std::vector<int8_t>(shape.sub_len, 1)});
    }
    VertexSet seg_pool = pool - taken;
    std::vector<ExactPath> segs;
    try {
      segs = connect_pairs_exact_directed(g, reqs, seg_pool, weave, seed.child(attempt).child(7));
    } catch (const StageStalled&) {
      continue;
    }
    ReversiblePath rp;
    rp.x = x;
    rp.y = y;
    rp.all = VertexSet(n);
    rp.all.insert(x);
    rp.all.insert(y);
    rp.forward.vertices = {x};
    for (int i = 1; i <= j; ++i) {
      rp.forward.vertices.insert(rp.forward.vertices.end(), segs[i - 1].vertices.begin(),
                                 segs[i - 1].vertices.end());
      for (int v : segs[i - 1].vertices) rp.all.insert(v);
    }
    rp.forward.vertices.push_back(y);
    rp.backward.vertices = {y};
    for (int i = j; i >= 1; --i) {
      rp.backward.vertices.insert(rp.backward.vertices.end(), segs[i - 1].vertices.begin(),
                                  segs[i - 1].vertices.end());
    }
    rp.backward.vertices.push_back(x);
    if (validate_reversible_path(g, rp)) return rp;
  }
  throw RetriesExhausted("build_reversible_path: retries exhausted");
}

bool validate_absorber_directed(const DiGraph& g, const DirectedAbsorber& a) {
  if (a.r == a.s || a.r < 0 || a.s < 0 || a.absorbable < 0) return false;
  if (!a.r_set.contains(a.r) || !a.r_set.contains(a.s)) return false;
  if (a.r_set.contains(a.absorbable)) return false;
  std::vector<int8_t> f1(a.skip_path.vertices.size() - 1, 1);
  std::vector<int8_t> f2(a.absorb_path.vertices.size() - 1, 1);
  if (!validate_path_directed(g, a.skip_path, f1) || !validate_path_directed(g, a.absorb_path, f2)) {
    return false;
  }
  if (a.skip_path.front() != a.r || a.skip_path.back() != a.s) return false;
  if (a.absorb_path.front() != a.r || a.absorb_path.back() != a.s) return false;
  VertexSet skip_vs = path_set(g.size(), a.skip_path.vertices);
  VertexSet abs_vs = path_set(g.size(), a.absorb_path.vertices);
  VertexSet with_v = a.r_set;
  with_v.insert(a.absorbable);
  return skip_vs == a.r_set && abs_vs == with_v;
}

std::vector<DirectedAbsorber> build_absorbers_directed(const DiGraph& g,
                                                       const std::vector<AbsorberAnchors>& anchors,
                                                       const VertexSet& w_spine,
                                                       const VertexSet& w_paths,
                                                       const DirectedAbsorberShape& shape,
                                                       const WeaveConfig& weave, RngSeed seed) {
  int k = shape.k_paths;
  if (k < 1) throw InvalidArgument("build_absorbers_directed: bad shape");
  for (const auto& an : anchors) {
    if (!g.has_arc(an.x0, an.v) || !g.has_arc(an.v, an.y1)) {
      throw InvalidArgument("build_absorbers_directed: anchor arcs missing");
    }
  }
  // spine orientations: head and bridge forward, tail reversed
  std::vector<int8_t> qorient;
  for (int i = 0; i < k + 1; ++i) qorient.push_back(1);
  for (int i = 0; i < k; ++i) qorient.push_back(-1);
  std::vector<PathRequest> qreq;
  for (const auto& an : anchors) qreq.push_back(PathRequest{an.x0, an.y1, 2 * k + 1, qorient});
  std::vector<ExactPath> spines = connect_pairs_exact_directed(g, qreq, w_spine, weave, seed.child(1));

  VertexSet pool = w_paths;
  std::vector<DirectedAbsorber> out;
  out.reserve(anchors.size());
  for (size_t a = 0; a < anchors.size(); ++a) {
    SpineLabels sp(spines[a].vertices, k);
    std::vector<ReversiblePath> gadgets;
    for (int i = 1; i <= k; ++i) {
      ReversiblePath rp =
          build_reversible_path(g, sp.xs[i], sp.ys[i], pool, shape.rev, weave, seed.child(100 + a * k + i));
      VertexSet internal = rp.all;
      internal.erase(rp.x);
      internal.erase(rp.y);
      pool -= internal;
      gadgets.push_back(std::move(rp));
    }
    DirectedAbsorber ab;
    ab.r = sp.x0;
    ab.s = sp.y0;
    ab.absorbable = anchors[a].v;
    ab.r_set = VertexSet(g.size());
    ab.r_set.insert(sp.x0);
    ab.r_set.insert(sp.y0);
    for (const auto& rp : gadgets) ab.r_set |= rp.all;
    auto traverse = [&](int i, bool forward, std::vector<int>& seq) {
      const auto& pv = forward ? gadgets[i - 1].forward.vertices : gadgets[i - 1].backward.vertices;
      seq.insert(seq.end(), pv.begin(), pv.end());
    };
    ab.skip_path.vertices = assemble_witness(sp, k, false, -1, traverse);
    ab.absorb_path.vertices = assemble_witness(sp, k, true, anchors[a].v, traverse);
    if (!validate_absorber_directed(g, ab)) throw Error("build_absorbers_directed: gadget failed validation");
    out.push_back(std::move(ab));
  }
  return out;
}

DirectedAbsorbingStructure build_absorbing_structure_directed(const DiGraph& g, const VertexSet& a,
                                                              const VertexSet& w,
                                                              const std::vector<int>& xs,
                                                              const std::vector<int>& ys, int l,
                                                              const DirectedStructureConfig& cfg,
                                                              RngSeed seed) {
  int n = g.size();
  if (xs.size() != ys.size() || xs.empty() || xs.size() % 3 != 0) {
    throw InvalidArgument("build_absorbing_structure_directed: need 3r endpoint pairs");
  }
  int r = static_cast<int>(xs.size()) / 3;
  if (a.count() != 2 * r) throw InvalidArgument("build_absorbing_structure_directed: |A| must be 2r");

  DirectedAbsorbingStructure st;
  st.r = r;
  st.l = l;
  st.tpl = build_flex_template(3 * r, seed.child(1), cfg.tmpl_verify, cfg.tmpl);
  st.a_vertices = a.to_vector();

  int k = cfg.shape.k_paths;
  int gsize = cfg.shape.size();
  long long link_total = 0;
  long long edge_count = 0;
  for (int j = 0; j < 3 * r; ++j) {
    int t = static_cast<int>(st.tpl.adj[j].size());
    edge_count += t;
    for (int x : link_lengths(l, t, gsize, cfg.min_link)) link_total += x;
  }
  auto sz = [&](double raw) { return static_cast<int>(std::ceil(raw * cfg.pool_slack)); };
  int size_b = 2 * r;
  int size_anchor = sz(2.0 * edge_count);
  int size_spine = sz(static_cast<double>(edge_count) * (2 * k + 1));
  int size_paths = sz(static_cast<double>(edge_count) * k * (cfg.shape.rev.size() - 2));
  int size_link = sz(static_cast<double>(link_total));
  long long need = static_cast<long long>(size_b) + size_anchor + size_spine + size_paths + size_link;
  if (need > w.count()) throw InvalidArgument("build_absorbing_structure_directed: W too small");
  std::vector<int> sizes{size_b, size_anchor, size_spine, size_paths, size_link,
                         w.count() - static_cast<int>(need)};
  SplitConfig scfg;
  scfg.enforce_k_cap = false;
  scfg.verify_budget = cfg.weave.split_verify_budget;
  std::vector<VertexSet> pools = split_target_directed(g, w, sizes, 8.0, seed.child(2), scfg);
  const VertexSet& w_b = pools[0];
  const VertexSet& w_anchor = pools[1];
  const VertexSet& w_spine = pools[2];
  const VertexSet& w_paths = pools[3];
  const VertexSet& w_link = pools[4];

  st.b_vertices = w_b.to_vector();
  SlotLayout lay = layout_slots(st.tpl, st.a_vertices, st.b_vertices);

  // anchors need direction: x0 -> v and v -> y1, so one in-anchor and one
  // out-anchor per template edge
  std::vector<int> pool_list = w_anchor.to_vector();
  std::vector<int> pool_index(n, -1);
  for (size_t i = 0; i < pool_list.size(); ++i) pool_index[pool_list[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> cand;
  std::vector<int> dem;
  std::vector<int> owner_slot;
  for (int s = 0; s < 2 * st.tpl.m; ++s) {
    if (lay.rev[s].empty()) continue;
    int v = lay.slot_vertex[s];
    std::vector<int> cin, cout;
    for (int u : g.in_neighbors(v)) {
      if (pool_index[u] >= 0) cin.push_back(pool_index[u]);
    }
    for (int u : g.out_neighbors(v)) {
      if (pool_index[u] >= 0) cout.push_back(pool_index[u]);
    }
    cand.push_back(std::move(cin));
    dem.push_back(static_cast<int>(lay.rev[s].size()));
    owner_slot.push_back(s);
    cand.push_back(std::move(cout));
    dem.push_back(static_cast<int>(lay.rev[s].size()));
    owner_slot.push_back(s);
  }
  GenMatchResult am = generalized_matching(static_cast<int>(pool_list.size()), cand, dem);
  if (!am.ok) {
    std::vector<int> cert;
    for (int i : am.deficient) cert.push_back(lay.slot_vertex[owner_slot[i]]);
    throw MatchingInfeasible("build_absorbing_structure_directed: anchor matching failed", cert);
  }

  std::vector<AbsorberAnchors> anchors;
  std::map<std::pair<int, int>, int> gadget_of;
  {
    int row = 0;
    for (int s = 0; s < 2 * st.tpl.m; ++s) {
      if (lay.rev[s].empty()) continue;
      const auto& ins = am.assignment[row];
      const auto& outs = am.assignment[row + 1];
      row += 2;
      const std::vector<int>& js = lay.rev[s];
      for (size_t i = 0; i < js.size(); ++i) {
        gadget_of[{js[i], s}] = static_cast<int>(anchors.size());
        anchors.push_back(AbsorberAnchors{lay.slot_vertex[s], pool_list[ins[i]], pool_list[outs[i]]});
      }
    }
  }
  std::vector<DirectedAbsorber> gadgets =
      build_absorbers_directed(g, anchors, w_spine, w_paths, cfg.shape, cfg.weave, seed.child(4));

  std::vector<PathRequest> link_reqs;
  std::vector<std::vector<int>> req_of_j(3 * r);
  for (int j = 0; j < 3 * r; ++j) {
    const auto& slots = st.tpl.adj[j];
    int t = static_cast<int>(slots.size());
    std::vector<int> lam = link_lengths(l, t, gsize, cfg.min_link);
    int prev_end = xs[j];
    for (int i = 0; i <= t; ++i) {
      int next_start = i < t ? gadgets[gadget_of[{j, slots[i]}]].r : ys[j];
      req_of_j[j].push_back(static_cast<int>(link_reqs.size()));
      link_reqs.push_back(PathRequest{prev_end, next_start, lam[i], std::vector<int8_t>(lam[i], 1)});
      if (i < t) prev_end = gadgets[gadget_of[{j, slots[i]}]].s;
    }
  }
  std::vector<ExactPath> links = connect_pairs_exact_directed(g, link_reqs, w_link, cfg.weave, seed.child(5));

  st.merged.reserve(3 * r);
  st.w_prime = VertexSet(n);
  for (int v : st.b_vertices) st.w_prime.insert(v);
  for (int j = 0; j < 3 * r; ++j) {
    DirectedMergedAbsorber ma;
    ma.x = xs[j];
    ma.y = ys[j];
    ma.s_set = VertexSet(n);
    ma.s_set.insert(xs[j]);
    ma.s_set.insert(ys[j]);
    for (int s : st.tpl.adj[j]) {
      const DirectedAbsorber& gd = gadgets[gadget_of[{j, s}]];
      ma.chain_vs.push_back(lay.slot_vertex[s]);
      ma.gadgets.push_back(gd);
      ma.s_set |= gd.r_set;
    }
    for (int ri : req_of_j[j]) {
      ma.links.push_back(links[ri]);
      for (int v : links[ri].vertices) ma.s_set.insert(v);
    }
    if (ma.s_set.count() != l - 1) throw Error("build_absorbing_structure_directed: |S_j| != l-1");
    VertexSet interior = ma.s_set;
    interior.erase(ma.x);
    interior.erase(ma.y);
    if (interior.intersects(st.w_prime)) throw Error("build_absorbing_structure_directed: overlap");
    st.w_prime |= interior;
    st.merged.push_back(std::move(ma));
  }
  long long expect = 3LL * r * (l - 2) - r;
  if (st.w_prime.count() != expect) throw Error("build_absorbing_structure_directed: |W'| mismatch");
  return st;
}

std::vector<ExactPath> absorb_directed(const DiGraph& g, const DirectedAbsorbingStructure& st,
                                       const VertexSet& a_prime) {
  if (a_prime.count() != st.r) throw InvalidArgument("absorb_directed: |A'| must equal r");
  std::vector<int> z_slots;
  for (int i = 0; i < 2 * st.r; ++i) {
    if (a_prime.contains(st.a_vertices[i])) z_slots.push_back(st.tpl.m + i);
  }
  if (static_cast<int>(z_slots.size()) != st.r) throw InvalidArgument("absorb_directed: A' not inside A");
  std::vector<int> match = resilient_match(st.tpl, z_slots);

  std::vector<int> slot_vertex(2 * st.tpl.m);
  for (int s = 0; s < st.tpl.m; ++s) slot_vertex[s] = st.b_vertices[s];
  for (int s = 0; s < st.tpl.m; ++s) slot_vertex[st.tpl.m + s] = st.a_vertices[s];

  std::vector<ExactPath> out;
  VertexSet covered(g.size());
  for (size_t j = 0; j < st.merged.size(); ++j) {
    const DirectedMergedAbsorber& ma = st.merged[j];
    int v = slot_vertex[match[j]];
    ExactPath p = traverse_merged(ma, v, [&](size_t i, bool absorb_here, std::vector<int>& seq) {
      const ExactPath& wit = absorb_here ? ma.gadgets[i].absorb_path : ma.gadgets[i].skip_path;
      seq.insert(seq.end(), wit.vertices.begin() + 1, wit.vertices.end());
    });
    std::vector<int8_t> fwd(p.vertices.size() - 1, 1);
    if (p.length() != st.l - 1 || p.front() != ma.x || p.back() != ma.y ||
        !validate_path_directed(g, p, fwd)) {
      throw Error("absorb_directed: assembled path failed validation");
    }
    for (int pv : p.vertices) {
      if (covered.contains(pv)) throw Error("absorb_directed: paths overlap");
      covered.insert(pv);
    }
    out.push_back(std::move(p));
  }
  VertexSet want = st.w_prime | a_prime;
  for (const auto& ma : st.merged) {
    want.insert(ma.x);
    want.insert(ma.y);
  }
  if (!(covered == want)) throw Error("absorb_directed: coverage mismatch");
  return out;
}

}  // namespace tw
