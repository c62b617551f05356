#pragma once

#include <optional>
#include <vector>

#include "treeweave/graph.hpp"
#include "treeweave/path_weaver.hpp"

namespace tw {

// (R, r, s) gadget: an r,s-path exists on vertex set R and on R u {v}, so v
// can be swallowed into a path of known length on demand.
struct Absorber {
  VertexSet r_set;
  int r = -1, s = -1;
  int absorbable = -1;
  ExactPath skip_path;    // vertex set exactly R
  ExactPath absorb_path;  // vertex set exactly R u {v}
};

// Checks both witness traversals against the host with no knowledge of how
// the absorber was built.
bool validate_absorber(const Graph& g, const Absorber& a);

// Splice two absorbers with a connecting path; the merged gadget absorbs
// either vertex.
Absorber merge_absorbers(const Graph& g, const Absorber& a, const Absorber& b, const ExactPath& link);

// Geometry of one gadget: k_paths internal paths of p_len edges each, plus a
// spine of length 2 k_paths + 1. Size is k_paths * (p_len + 1) + 2.
struct AbsorberShape {
  int k_paths = 1;
  int p_len = 2;
  int size() const { return k_paths * (p_len + 1) + 2; }
  int spine_len() const { return 2 * k_paths + 1; }
};

struct AbsorberAnchors {
  int v;        // vertex to absorb
  int x0, y1;   // its two matched neighbors; the spine runs between them
};

// Builds one gadget per anchor triple, spines through w_spine and internal
// paths through w_paths, all disjoint.
std::vector<Absorber> build_absorbers(const Graph& g, const std::vector<AbsorberAnchors>& anchors,
                                      const VertexSet& w_spine, const VertexSet& w_paths,
                                      const AbsorberShape& shape, const WeaveConfig& weave,
                                      RngSeed seed);

Absorber build_absorber(const Graph& g, int v, std::pair<int, int> anchor_pair, const VertexSet& w2,
                        const VertexSet& w3, const AbsorberShape& shape, const WeaveConfig& weave,
                        RngSeed seed);

// Bipartite wiring template with the resilient-matching property: X matches
// into Y plus any half of Z. Y slots are [0, m), Z slots [m, 2m).
struct FlexTemplate {
  int n_x = 0;
  int m = 0;  // |Y| = |Z| = 2 n_x / 3
  std::vector<std::vector<int>> adj;  // per X vertex, sorted slot ids

  int max_degree() const;
  std::vector<std::vector<int>> slot_adj() const;  // reverse adjacency
};

enum class TemplateVerify { exhaustive, sampled };

struct TemplateConfig {
  int matchings = 20;
  int max_resamples = 64;
  int sample_count = 200;  // random Z' draws in sampled mode
};

FlexTemplate build_flex_template(int n_x, RngSeed seed, TemplateVerify verify,
                                 const TemplateConfig& cfg = {});

// Perfect matching of X into Y u Z' via augmenting search; z_slots lists the
// chosen Z' (slot ids), |Z'| = n_x / 3. Returns the matched slot per X vertex.
std::vector<int> resilient_match(const FlexTemplate& t, const std::vector<int>& z_slots);

struct MergedAbsorber {
  int x = -1, y = -1;          // pair endpoints
  VertexSet s_set;             // S_j including x and y
  std::vector<int> chain_vs;   // absorbable vertices in chain order
  std::vector<Absorber> gadgets;
  std::vector<ExactPath> links;  // x->r_1, s_i->r_{i+1}, s_t->y
};

struct StructureConfig {
  AbsorberShape shape;
  TemplateConfig tmpl;
  TemplateVerify tmpl_verify = TemplateVerify::sampled;
  WeaveConfig weave;
  int min_link = 2;
  double pool_slack = 1.45;  // working-pool sizing over the bare minimum
};

struct AbsorbingStructure {
  int r = 0;
  int l = 0;
  FlexTemplate tpl;
  std::vector<int> a_vertices;  // Z class, sorted
  std::vector<int> b_vertices;  // Y class (padding), sorted
  std::vector<MergedAbsorber> merged;  // 3r entries
  VertexSet w_prime;
};

// Lemma-14-style structure: B picked in W, one gadget per template edge, the
// gadgets chained into 3r merged absorbers (S_j, x_j, y_j) with |S_j| = l-1.
AbsorbingStructure build_absorbing_structure(const Graph& g, const VertexSet& a, const VertexSet& w,
                                             const std::vector<int>& xs, const std::vector<int>& ys,
                                             int l, const StructureConfig& cfg, RngSeed seed);

// Given any A' of size r inside A, produces 3r disjoint x_j,y_j-paths of
// length l-1 that exactly cover W' u A'.
std::vector<ExactPath> absorb(const Graph& g, const AbsorbingStructure& st, const VertexSet& a_prime);

// ---- directed counterparts ----

// Gadget with directed traversals both x -> y and y -> x over the same vertex
// set.
struct ReversiblePath {
  int x = -1, y = -1;
  VertexSet all;
  ExactPath forward;   // x .. y, every hop a forward arc
  ExactPath backward;  // y .. x, every hop a forward arc
};

bool validate_reversible_path(const DiGraph& g, const ReversiblePath& p);

struct ReversibleShape {
  int subpaths = 3;   // heavy segments
  int sub_len = 2;    // arcs per segment
  int size() const { return subpaths * (sub_len + 1) + 2; }
};

ReversiblePath build_reversible_path(const DiGraph& g, int x, int y, const VertexSet& pool,
                                     const ReversibleShape& shape, const WeaveConfig& weave,
                                     RngSeed seed);

struct DirectedAbsorber {
  VertexSet r_set;
  int r = -1, s = -1;
  int absorbable = -1;
  ExactPath skip_path;    // directed r -> s path on R
  ExactPath absorb_path;  // directed r -> s path on R u {v}
};

bool validate_absorber_directed(const DiGraph& g, const DirectedAbsorber& a);

struct DirectedAbsorberShape {
  int k_paths = 1;
  ReversibleShape rev;
  int size() const { return k_paths * rev.size() + 2; }
  int spine_len() const { return 2 * k_paths + 1; }
};

std::vector<DirectedAbsorber> build_absorbers_directed(const DiGraph& g,
                                                       const std::vector<AbsorberAnchors>& anchors,
                                                       const VertexSet& w_spine,
                                                       const VertexSet& w_paths,
                                                       const DirectedAbsorberShape& shape,
                                                       const WeaveConfig& weave, RngSeed seed);

struct DirectedMergedAbsorber {
  int x = -1, y = -1;
  VertexSet s_set;
  std::vector<int> chain_vs;
  std::vector<DirectedAbsorber> gadgets;
  std::vector<ExactPath> links;
};

struct DirectedStructureConfig {
  DirectedAbsorberShape shape;
  TemplateConfig tmpl;
  TemplateVerify tmpl_verify = TemplateVerify::sampled;
  WeaveConfig weave;
  int min_link = 2;
  double pool_slack = 1.45;
};

struct DirectedAbsorbingStructure {
  int r = 0;
  int l = 0;
  FlexTemplate tpl;
  std::vector<int> a_vertices;
  std::vector<int> b_vertices;
  std::vector<DirectedMergedAbsorber> merged;
  VertexSet w_prime;
};

DirectedAbsorbingStructure build_absorbing_structure_directed(const DiGraph& g, const VertexSet& a,
                                                              const VertexSet& w,
                                                              const std::vector<int>& xs,
                                                              const std::vector<int>& ys, int l,
                                                              const DirectedStructureConfig& cfg,
                                                              RngSeed seed);

std::vector<ExactPath> absorb_directed(const DiGraph& g, const DirectedAbsorbingStructure& st,
                                       const VertexSet& a_prime);

}  // namespace tw
