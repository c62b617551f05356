#include "treeweave/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "treeweave/errors.hpp"
#include "treeweave/expansion.hpp"

namespace tw {

ScaleParams ScaleParams::desk(int delta) {
  ScaleParams p;
  p.delta = delta;
  return p;
}

ScaleParams ScaleParams::paper(int n, int delta) {
  ScaleParams p;
  p.strict_paper_mode = true;
  p.delta = delta;
  double ln = std::log(static_cast<double>(n));
  p.expander_d = delta * std::pow(ln, 4) / 20.0;
  p.bare_k = static_cast<int>(std::ceil(1e3 * ln * ln));
  p.cover_l = p.bare_k + 1;
  p.template_matchings = 20;
  p.absorbers_per_vertex = 40;
  p.absorber_k_paths = static_cast<int>(std::ceil(ln));
  p.absorber_p_len = std::max(2, p.absorber_k_paths - 1);
  p.leaf_removal_frac = 1.0 / std::pow(ln, 3);
  p.d0 = static_cast<int>(std::ceil(2.0 * ln));
  p.stages = static_cast<int>(std::ceil(ln / std::log(std::max(2.0, ln))));
  return p;
}

WeaveConfig ScaleParams::weave() const {
  WeaveConfig w;
  w.d0 = d0;
  w.stages = stages;
  w.max_retries = max_retries;
  w.search_budget = search_budget;
  w.split_verify_budget = split_verify_budget;
  return w;
}

CoverConfig ScaleParams::cover() const {
  CoverConfig c;
  c.sigma_b = sigma_b;
  c.stragglers = stragglers;
  c.max_retries = max_retries;
  c.weave = weave();
  c.structure.shape.k_paths = absorber_k_paths;
  c.structure.shape.p_len = absorber_p_len;
  c.structure.tmpl.matchings = template_matchings;
  c.structure.weave = weave();
  return c;
}

std::string ScaleParams::to_text() const {
  std::ostringstream os;
  os << "strict_paper_mode=" << (strict_paper_mode ? 1 : 0) << '\n';
  os << "delta=" << delta << '\n';
  os << "expander_d=" << expander_d << '\n';
  os << "bare_k=" << bare_k << '\n';
  os << "cover_l=" << cover_l << '\n';
  os << "template_matchings=" << template_matchings << '\n';
  os << "absorbers_per_vertex=" << absorbers_per_vertex << '\n';
  os << "absorber_k_paths=" << absorber_k_paths << '\n';
  os << "absorber_p_len=" << absorber_p_len << '\n';
  os << "sigma_b=" << sigma_b << '\n';
  os << "stragglers=" << stragglers << '\n';
  os << "leaf_removal_frac=" << leaf_removal_frac << '\n';
  os << "min_leaf_removal=" << min_leaf_removal << '\n';
  os << "min_matching_centers=" << min_matching_centers << '\n';
  os << "max_retries=" << max_retries << '\n';
  os << "search_budget=" << search_budget << '\n';
  os << "split_verify_budget=" << split_verify_budget << '\n';
  os << "d0=" << d0 << '\n';
  os << "stages=" << stages << '\n';
  return os.str();
}

namespace {

std::map<std::string, std::string> read_kv(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config: expected key=value, got: " + line);
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    kv[key] = val;
  }
  return kv;
}

}  // namespace

ScaleParams ScaleParams::from_text(std::istream& is) {
  ScaleParams p = ScaleParams::desk();
  for (const auto& [key, val] : read_kv(is)) {
    if (key == "strict_paper_mode") p.strict_paper_mode = std::stoi(val) != 0;
    else if (key == "delta") p.delta = std::stoi(val);
    else if (key == "expander_d") p.expander_d = std::stod(val);
    else if (key == "bare_k") p.bare_k = std::stoi(val);
    else if (key == "cover_l") p.cover_l = std::stoi(val);
    else if (key == "template_matchings") p.template_matchings = std::stoi(val);
    else if (key == "absorbers_per_vertex") p.absorbers_per_vertex = std::stoi(val);
    else if (key == "absorber_k_paths") p.absorber_k_paths = std::stoi(val);
    else if (key == "absorber_p_len") p.absorber_p_len = std::stoi(val);
    else if (key == "sigma_b") p.sigma_b = std::stoi(val);
    else if (key == "stragglers") p.stragglers = std::stoi(val);
    else if (key == "leaf_removal_frac") p.leaf_removal_frac = std::stod(val);
    else if (key == "min_leaf_removal") p.min_leaf_removal = std::stoi(val);
    else if (key == "min_matching_centers") p.min_matching_centers = std::stoi(val);
    else if (key == "max_retries") p.max_retries = std::stoi(val);
    else if (key == "search_budget") p.search_budget = std::stoll(val);
    else if (key == "split_verify_budget") p.split_verify_budget = std::stoll(val);
    else if (key == "d0") p.d0 = std::stoi(val);
    else if (key == "stages") p.stages = std::stoi(val);
    else throw InvalidArgument("params: unknown key " + key);
  }
  return p;
}

std::string TrialRecord::to_text() const {
  std::ostringstream os;
  os << "seed: " << seed << '\n';
  os << "n: " << n << '\n';
  os << "delta: " << delta << '\n';
  os << "p: " << p << '\n';
  os << "branch: " << branch << '\n';
  os << "outcome: " << (success ? "success" : "failure(" + fail_phase + ")") << '\n';
  os << "wall_ms: " << wall_ms << '\n';
  for (const auto& [name, ms] : phase_ms) os << "phase_ms." << name << ": " << ms << '\n';
  return os.str();
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Graph union_graphs(const Graph& a, const Graph& b) {
  std::vector<std::pair<int, int>> edges = a.edges();
  auto more = b.edges();
  edges.insert(edges.end(), more.begin(), more.end());
  return Graph(a.size(), edges);
}

// Fresh bipartite reveal between center images and the free pool.
Graph reveal_bipartite(int n, const std::vector<int>& centers, const std::vector<int>& pool, double p,
                       RngSeed seed) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int c : centers) {
    for (int u : pool) {
      if (rng.bernoulli(p)) edges.emplace_back(c, u);
    }
  }
  return Graph(n, edges);
}

void strict_check(int n, double p, const ScaleParams& params) {
  double ln = std::log(static_cast<double>(n));
  double need_p = params.delta * std::pow(ln, 5) / n;
  if (p + 1e-12 < need_p) {
    throw InvalidArgument("strict mode: p below the required threshold (needs >= " +
                          std::to_string(need_p) + ")");
  }
  if (params.expander_d < 2.0 * params.delta) {
    throw InvalidArgument("strict mode: expander d below 2*delta, the embed theorem hypothesis fails");
  }
}

}  // namespace

TrialResult embed_spanning_tree(int n, double p, const TreeShape& t, const ScaleParams& params,
                                RngSeed seed) {
  if (t.size() != n) throw InvalidArgument("embed_spanning_tree: |T| must equal n");
  if (p < 0.0 || p > 1.0) throw InvalidArgument("embed_spanning_tree: p outside [0,1]");
  if (params.delta > 0 && t.max_degree() > params.delta) {
    throw InvalidArgument("embed_spanning_tree: guest degree exceeds the configured bound");
  }
  if (params.strict_paper_mode) strict_check(n, p, params);

  TrialResult res;
  res.record.seed = seed.seed;
  res.record.n = n;
  res.record.delta = params.delta;
  res.record.p = p;
  auto t0 = Clock::now();
  auto phase_mark = t0;
  auto note_phase = [&](const std::string& name) {
    res.record.phase_ms.emplace_back(name, ms_since(phase_mark));
    phase_mark = Clock::now();
  };
  auto fail = [&](const std::string& phase) -> TrialResult {
    res.record.success = false;
    res.record.fail_phase = phase;
    res.record.wall_ms = ms_since(t0);
    return std::move(res);
  };

  Graph g1 = gen_gnp(n, p / 2.0, seed.child(1));
  res.host = g1;
  note_phase("reveal");

  int k = params.effective_bare_k();
  Classification cls;
  try {
    cls = classify(t, k);
  } catch (const Error&) {
    return fail("classify");
  }
  res.record.branch = cls.kind == Classification::leafy ? "leafy" : "pathy";
  note_phase("classify");

  EmbedConfig ecfg;
  ecfg.max_retries = params.max_retries;

  if (cls.kind == Classification::leafy) {
    // drop a scaled batch of leaves, embed the rest, re-reveal, star-match
    std::vector<int> leaf_list = cls.leaf_set.to_vector();
    int want = std::max(params.min_leaf_removal,
                        static_cast<int>(std::floor(n * params.leaf_removal_frac)));
    want = std::min(want, static_cast<int>(leaf_list.size()));
    Rng rng(seed.child(2));
    rng.shuffle(leaf_list);
    VertexSet chosen(n);
    for (int i = 0; i < want; ++i) chosen.insert(leaf_list[i]);
    StripResult sr = strip(t, chosen);
    note_phase("strip");

    Embedding emb;
    try {
      emb = embed_forest(g1, sr.forest, VertexSet::full(n), ecfg, seed.child(3));
    } catch (const Error&) {
      return fail("embed-forest");
    }
    note_phase("embed-forest");

    if (static_cast<int>(sr.leaf_demands.size()) < params.min_matching_centers) {
      return fail("matching-centers-floor");
    }
    std::vector<int> centers, demands;
    for (auto [v, d] : sr.leaf_demands) {
      centers.push_back(emb.map[v]);
      demands.push_back(d);
    }
    VertexSet pool = VertexSet::full(n) - emb.used;
    Graph g2 = reveal_bipartite(n, centers, pool.to_vector(), p / 2.0, seed.child(4));
    res.host = union_graphs(g1, g2);
    note_phase("reveal-fresh");

    std::vector<std::vector<int>> stars;
    try {
      stars = attach_stars(res.host, StarDemand{centers, demands, pool}, seed.child(5));
    } catch (const Error&) {
      return fail("star-matching");
    }
    // place the removed leaves onto their matched pool vertices
    for (size_t ci = 0; ci < centers.size(); ++ci) {
      int guest_parent = sr.leaf_demands[ci].first;
      size_t at = 0;
      for (int leaf : t.children(guest_parent)) {
        if (chosen.contains(leaf)) emb.place(leaf, stars[ci][at++]);
      }
      if (t.parent(guest_parent) >= 0 && chosen.contains(t.parent(guest_parent))) {
        emb.place(t.parent(guest_parent), stars[ci][at++]);
      }
    }
    note_phase("star-matching");

    EmbeddingReport rep = verify_embedding(res.host, t, emb);
    if (!rep.valid) return fail("validator");
    res.embedding = std::move(emb);
    res.record.success = true;
    res.record.wall_ms = ms_since(t0);
    return res;
  }

  // pathy branch: strip bare paths, embed the forest into a 7/8 slice, cover
  // the leftover with exact-length paths
  StripResult sr = strip(t, cls.paths);
  note_phase("strip");

  std::vector<VertexSet> slices;
  try {
    SplitConfig scfg;
    scfg.verify_budget = params.split_verify_budget;
    scfg.enforce_k_cap = false;
    double d = params.expander_d > 0 ? params.expander_d : 8.0;
    slices = split_target(g1, VertexSet::full(n), {7 * n / 8, n - 7 * n / 8}, d, seed.child(6), scfg);
  } catch (const Error&) {
    return fail("split");
  }
  note_phase("split");

  Embedding emb;
  try {
    emb = embed_forest(g1, sr.forest, slices[0], ecfg, seed.child(7));
  } catch (const Error&) {
    return fail("embed-forest");
  }
  note_phase("embed-forest");

  // cover instance on the unused host vertices plus the request endpoints
  VertexSet leftover = VertexSet::full(n) - emb.used;
  VertexSet cover_verts = leftover;
  std::vector<std::pair<int, int>> host_pairs;
  for (const auto& req : sr.path_requests) {
    int hx = emb.map[req.end1], hy = emb.map[req.end2];
    cover_verts.insert(hx);
    cover_verts.insert(hy);
    host_pairs.emplace_back(hx, hy);
  }
  InducedGraph sub = induced(g1, cover_verts);
  std::vector<int> to_sub(n, -1);
  for (size_t i = 0; i < sub.to_parent.size(); ++i) to_sub[sub.to_parent[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> sub_pairs;
  for (auto [hx, hy] : host_pairs) sub_pairs.emplace_back(to_sub[hx], to_sub[hy]);

  int l = k + 1;
  std::vector<ExactPath> paths;
  try {
    paths = cover_with_paths(sub.graph, sub_pairs, l, params.cover(), seed.child(8));
  } catch (const CoverFailed& e) {
    return fail(std::string("cover-") + to_string(e.phase));
  } catch (const Error&) {
    return fail("cover");
  }
  note_phase("cover");

  // splice the covered paths back onto the guest bare paths
  for (size_t i = 0; i < sr.path_requests.size(); ++i) {
    const BarePath& bp = cls.paths[i];
    const ExactPath& hp = paths[i];
    for (size_t j = 1; j + 1 < bp.vertices.size(); ++j) {
      emb.place(bp.vertices[j], sub.to_parent[hp.vertices[j]]);
    }
  }
  note_phase("splice");

  EmbeddingReport rep = verify_embedding(g1, t, emb);
  if (!rep.valid) return fail("validator");
  res.embedding = std::move(emb);
  res.record.success = true;
  res.record.wall_ms = ms_since(t0);
  return res;
}

void threshold_scan(const ScanConfig& cfg, std::ostream& csv) {
  if (cfg.ns.empty() || cfg.ps.empty() || cfg.families.empty()) {
    throw InvalidArgument("threshold_scan: empty grid");
  }
  csv << "n,p,family,delta,trials,successes,mean_ms,branch_counts\n";
  csv.flush();
  uint64_t cell_id = 0;
  for (int n : cfg.ns) {
    for (double p : cfg.ps) {
      for (TreeFamily fam : cfg.families) {
        ++cell_id;
        int successes = 0;
        double total_ms = 0.0;
        std::map<std::string, int> branches;
        for (int t = 0; t < cfg.trials; ++t) {
          RngSeed ts{cfg.seed, cell_id * 1000003ULL + static_cast<uint64_t>(t)};
          TreeShape tree = gen_random_tree(n, cfg.delta, fam, ts.child(0));
          TrialResult r = embed_spanning_tree(n, p, tree, cfg.params, ts.child(1));
          successes += r.record.success ? 1 : 0;
          total_ms += r.record.wall_ms;
          branches[r.record.branch.empty() ? "none" : r.record.branch] += 1;
        }
        std::ostringstream bc;
        bool first = true;
        for (const auto& [name, count] : branches) {
          if (!first) bc << ';';
          first = false;
          bc << name << ':' << count;
        }
        csv << n << ',' << p << ',' << to_string(fam) << ',' << cfg.delta << ',' << cfg.trials << ','
            << successes << ',' << total_ms / std::max(1, cfg.trials) << ',' << bc.str() << '\n';
        csv.flush();
      }
    }
  }
}

ScanConfig read_scan_config(std::istream& is) {
  ScanConfig cfg;
  std::ostringstream params_text;
  for (const auto& [key, val] : read_kv(is)) {
    std::istringstream vs(val);
    if (key == "n") {
      std::string tok;
      while (std::getline(vs, tok, ',')) cfg.ns.push_back(std::stoi(tok));
    } else if (key == "p") {
      std::string tok;
      while (std::getline(vs, tok, ',')) cfg.ps.push_back(std::stod(tok));
    } else if (key == "family") {
      std::string tok;
      while (std::getline(vs, tok, ',')) cfg.families.push_back(tree_family_from_string(tok));
    } else if (key == "delta") {
      cfg.delta = std::stoi(val);
    } else if (key == "trials") {
      cfg.trials = std::stoi(val);
    } else if (key == "seed") {
      cfg.seed = std::stoull(val);
    } else if (key.rfind("params.", 0) == 0) {
      params_text << key.substr(7) << '=' << val << '\n';
    } else {
      throw InvalidArgument("scan config: unknown key " + key);
    }
  }
  std::istringstream ps(params_text.str());
  cfg.params = ScaleParams::from_text(ps);
  cfg.params.delta = cfg.delta;
  return cfg;
}

}  // namespace tw
