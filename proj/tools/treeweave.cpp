#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "treeweave/cover.hpp"
#include "treeweave/errors.hpp"
#include "treeweave/expansion.hpp"
#include "treeweave/pipeline.hpp"

using namespace tw;

namespace {

TreeShape load_tree(const std::string& spec, int n, int delta, uint64_t seed) {
  // either a file path or "family:<name>"
  if (spec.rfind("family:", 0) == 0) {
    return gen_random_tree(n, delta, tree_family_from_string(spec.substr(7)), RngSeed{seed, 17});
  }
  std::ifstream in(spec);
  if (!in) throw InvalidArgument("cannot open tree file: " + spec);
  return read_tree(in);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open graph file: " + path);
  return read_edge_list(in);
}

ScaleParams load_params(const std::string& path) {
  if (path.empty()) return ScaleParams::desk();
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open params file: " + path);
  return ScaleParams::from_text(in);
}

int run_embed(int n, double p, const std::string& tree_spec, uint64_t seed,
              const std::string& params_file, int delta, const std::string& out_embedding,
              const std::string& out_graph) {
  ScaleParams params = load_params(params_file);
  if (delta > 0) params.delta = delta;
  TreeShape t = load_tree(tree_spec, n, params.delta, seed);
  if (params.delta < t.max_degree()) params.delta = t.max_degree();
  TrialResult r = embed_spanning_tree(n, p, t, params, RngSeed{seed, 0});
  std::cout << r.record.to_text();
  if (!out_embedding.empty() && r.record.success) {
    std::ofstream out(out_embedding);
    write_embedding(out, r.embedding);
  }
  if (!out_graph.empty()) {
    std::ofstream out(out_graph);
    write_edge_list(out, r.host);
  }
  return r.record.success ? 0 : 1;
}

int run_certify(const std::string& graph_file, double d, const std::string& mode, long long budget,
                uint64_t seed) {
  Graph g = load_graph(graph_file);
  CheckMode m = mode == "exhaustive" ? CheckMode::exhaustive : CheckMode::sampled;
  ExpansionReport rep = check_expander(g, d, m, budget, RngSeed{seed, 0});
  std::cout << rep.to_text();
  return rep.holds ? 0 : 1;
}

int run_cover(const std::string& graph_file, const std::string& pairs_file, int len, uint64_t seed,
              const std::string& params_file, const std::string& out_file) {
  Graph g = load_graph(graph_file);
  std::ifstream pin(pairs_file);
  if (!pin) throw InvalidArgument("cannot open pairs file: " + pairs_file);
  std::vector<std::pair<int, int>> pairs;
  int x, y;
  while (pin >> x >> y) pairs.emplace_back(x, y);
  ScaleParams params = load_params(params_file);
  try {
    auto paths = cover_with_paths(g, pairs, len, params.cover(), RngSeed{seed, 0});
    std::ostream* os = &std::cout;
    std::ofstream fout;
    if (!out_file.empty()) {
      fout.open(out_file);
      os = &fout;
    }
    for (const auto& p : paths) {
      for (size_t i = 0; i < p.vertices.size(); ++i) {
        (*os) << p.vertices[i] << (i + 1 < p.vertices.size() ? ' ' : '\n');
      }
    }
    return 0;
  } catch (const CoverFailed& e) {
    std::cout << "cover failed in phase " << to_string(e.phase) << ": " << e.what() << '\n';
    return 1;
  }
}

int run_scan(const std::string& config_file, const std::string& out_csv) {
  std::ifstream in(config_file);
  if (!in) throw InvalidArgument("cannot open scan config: " + config_file);
  ScanConfig cfg = read_scan_config(in);
  std::ofstream out(out_csv);
  if (!out) throw InvalidArgument("cannot open output csv: " + out_csv);
  threshold_scan(cfg, out);
  return 0;
}

int run_verify(const std::string& graph_file, const std::string& tree_file,
               const std::string& embedding_file) {
  Graph g = load_graph(graph_file);
  std::ifstream tin(tree_file);
  if (!tin) throw InvalidArgument("cannot open tree file: " + tree_file);
  TreeShape t = read_tree(tin);
  std::ifstream ein(embedding_file);
  if (!ein) throw InvalidArgument("cannot open embedding file: " + embedding_file);
  Embedding emb = read_embedding(ein, t.size(), g.size());
  EmbeddingReport rep = verify_embedding(g, t, emb);
  std::cout << "valid: " << (rep.valid ? "true" : "false") << '\n';
  for (const auto& pr : rep.problems) std::cout << "problem: " << pr << '\n';
  return rep.valid ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spanning-tree embedding toolkit"};
  app.require_subcommand(1);

  auto* embed = app.add_subcommand("embed", "embed a bounded-degree spanning tree into G(n,p)");
  int n = 0, delta = 0;
  double p = 0.0;
  std::string tree_spec, params_file, out_embedding, out_graph;
  uint64_t seed = 1;
  embed->add_option("--n", n, "host size")->required();
  embed->add_option("--p", p, "edge probability")->required();
  embed->add_option("--tree", tree_spec, "tree file or family:<name>")->required();
  embed->add_option("--seed", seed, "rng seed");
  embed->add_option("--params", params_file, "scale parameter file (key=value)");
  embed->add_option("--delta", delta, "guest degree bound for generated trees");
  embed->add_option("--out-embedding", out_embedding, "write the embedding here on success");
  embed->add_option("--out-graph", out_graph, "write the revealed host graph here");

  auto* certify = app.add_subcommand("certify", "check the expander property");
  std::string graph_file, mode = "sampled";
  double d = 1.0;
  long long budget = 2000;
  certify->add_option("--graph", graph_file, "edge-list file")->required();
  certify->add_option("--d", d, "expansion factor")->required();
  certify->add_option("--mode", mode, "exhaustive or sampled");
  certify->add_option("--budget", budget, "sampled candidate sets per condition");
  certify->add_option("--seed", seed, "rng seed");

  auto* cover = app.add_subcommand("cover", "cover a graph with exact-length anchored paths");
  std::string pairs_file, out_file;
  int len = 0;
  cover->add_option("--graph", graph_file, "edge-list file")->required();
  cover->add_option("--pairs", pairs_file, "file of endpoint pairs, one 'x y' per line")->required();
  cover->add_option("--len", len, "path vertex count l (paths have length l-1)")->required();
  cover->add_option("--seed", seed, "rng seed");
  cover->add_option("--params", params_file, "scale parameter file");
  cover->add_option("--out", out_file, "write the paths here");

  auto* scan = app.add_subcommand("scan", "success-rate grid over (n, p, family)");
  std::string config_file, out_csv;
  scan->add_option("--config", config_file, "scan config file")->required();
  scan->add_option("--out", out_csv, "output CSV")->required();

  auto* verify = app.add_subcommand("verify", "validate an embedding file");
  std::string tree_file, embedding_file;
  verify->add_option("--graph", graph_file, "edge-list file")->required();
  verify->add_option("--tree", tree_file, "tree file")->required();
  verify->add_option("--embedding", embedding_file, "embedding file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (embed->parsed()) {
      return run_embed(n, p, tree_spec, seed, params_file, delta, out_embedding, out_graph);
    }
    if (certify->parsed()) return run_certify(graph_file, d, mode, budget, seed);
    if (cover->parsed()) return run_cover(graph_file, pairs_file, len, seed, params_file, out_file);
    if (scan->parsed()) return run_scan(config_file, out_csv);
    if (verify->parsed()) return run_verify(graph_file, tree_file, embedding_file);
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
