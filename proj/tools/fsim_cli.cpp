// SPDX-License-Identifier: Apache-2.0
//
// fsim: command-line front end for fractional simulation scores.

#include <openssl/evp.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif
#include "fsim/fsim.hpp"

namespace {

using namespace fsim;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitResource = 3;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string format_ms(double ms) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << ms;
  return s.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream s;
  for (unsigned i = 0; i < len; ++i) {
    s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return s.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
  if (!out) throw ValidationError("write failed for " + path);
}

struct GraphFiles {
  std::string edges;
  std::string labels;
};

LabeledDigraph load(const GraphFiles& f, RunManifest* manifest,
                    const std::string& tag) {
  const auto edges = read_file(f.edges);
  const auto labels = read_file(f.labels);
  if (manifest) {
    manifest->add(tag + "_edges", f.edges);
    manifest->add(tag + "_edges_sha256", sha256_hex(edges));
    manifest->add(tag + "_labels", f.labels);
    manifest->add(tag + "_labels_sha256", sha256_hex(labels));
  }
  std::istringstream es(edges), ls(labels);
  return load_graph(es, ls);
}

void add_graph_options(CLI::App* cmd, GraphFiles& g, const std::string& tag) {
  cmd->add_option("--" + std::string("g") + tag, g.edges, "edge file (src<TAB>dst)")
      ->required();
  cmd->add_option("--" + std::string("l") + tag, g.labels,
                  "label file (node<TAB>label)")
      ->required();
}

struct EngineFlags {
  std::string variant = "bj";
  std::string label_fn = "jw";
  std::string conv = "abs";
  std::string matching = "exact-small";
  FSimConfig cfg;
  std::size_t max_iter = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--variant", variant, "s, dp, b or bj")
        ->check(CLI::IsMember({"s", "dp", "b", "bj"}))
        ->capture_default_str();
    cmd->add_option("--wplus", cfg.w_plus, "out-neighbor weight")->capture_default_str();
    cmd->add_option("--wminus", cfg.w_minus, "in-neighbor weight")->capture_default_str();
    cmd->add_option("--label-fn", label_fn, "indicator, edit or jw")
        ->check(CLI::IsMember({"indicator", "edit", "jw"}))
        ->capture_default_str();
    cmd->add_option("--theta", cfg.theta, "label threshold for mapped pairs")
        ->capture_default_str();
    cmd->add_option("--epsilon", cfg.epsilon, "convergence threshold")
        ->capture_default_str();
    cmd->add_option("--conv", conv, "abs or rel")
        ->check(CLI::IsMember({"abs", "rel"}))
        ->capture_default_str();
    cmd->add_flag("--ub", cfg.ub_enabled, "enable upper-bound pruning");
    cmd->add_option("--alpha", cfg.alpha, "pruned lookup factor")->capture_default_str();
    cmd->add_option("--beta", cfg.beta, "pruning threshold")->capture_default_str();
    cmd->add_option("--matching", matching, "greedy or exact-small")
        ->check(CLI::IsMember({"greedy", "exact-small"}))
        ->capture_default_str();
    cmd->add_option("--workers", cfg.workers, "worker threads")->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "iteration cap (0 = automatic)");
    cmd->add_option("--max-candidates", cfg.max_candidates,
                    "budget on stored candidate pairs")
        ->capture_default_str();
  }

  FSimConfig resolve() const {
    FSimConfig c = cfg;
    c.variant = parse_variant(variant);
    c.label_fn = parse_label_fn(label_fn);
    c.convergence = parse_convergence_mode(conv);
    c.matching = parse_matching_mode(matching);
    if (max_iter != 0) c.max_iterations = max_iter;
    c.validate();
    return c;
  }
};

std::string render_scores(const ScoreTable& t, const LabeledDigraph& g1,
                          const LabeledDigraph& g2) {
  std::ostringstream s;
  write_scores(s, t, g1, g2);
  return s.str();
}

void emit(const std::string& out_path, const RunManifest& m,
          const std::string& body) {
  std::ostringstream s;
  m.write_header(s);
  s << body;
  if (out_path.empty() || out_path == "-") {
    std::cout << s.str();
  } else {
    write_file(out_path, s.str());
    std::ostringstream tsv;
    m.write_tsv(tsv);
    write_file(out_path + ".manifest.tsv", tsv.str());
  }
}

// Sidecar name relative to the score file, so outputs stay relocatable.
std::string manifest_path(const std::string& out) {
  if (out.empty() || out == "-") return "none";
  return std::filesystem::path(out).filename().string() + ".manifest.tsv";
}

// ---- compute

struct ComputeArgs {
  GraphFiles g1, g2;
  EngineFlags flags;
  std::string out;
};

int cmd_compute(const ComputeArgs& a) {
  RunManifest m;
  m.add("command", "compute");
  m.add("manifest", manifest_path(a.out));
  const auto cfg = a.flags.resolve();
  add_config(m, cfg);

  auto t0 = Clock::now();
  const auto g1 = load(a.g1, &m, "g1");
  const auto g2 = load(a.g2, &m, "g2");
  const double load_ms = ms_since(t0);

  t0 = Clock::now();
  const auto result = iterate_to_convergence(g1, g2, cfg);
  const double compute_ms = ms_since(t0);

  t0 = Clock::now();
  const auto body = render_scores(result.scores, g1, g2);
  const double render_ms = ms_since(t0);

  m.add("candidates", std::to_string(result.scores.size()));
  m.add("iterations", std::to_string(result.report.iterations));
  m.add("converged", result.report.converged ? "true" : "false");
  m.add("final_delta", result.report.deltas.empty()
                           ? "0"
                           : format_param(result.report.deltas.back()));
  m.add("load_ms", format_ms(load_ms), false);
  m.add("compute_ms", format_ms(compute_ms), false);
  m.add("render_ms", format_ms(render_ms), false);
  emit(a.out, m, body);
  if (!result.report.converged) {
    std::cerr << "fsim: iteration cap reached after " << result.report.iterations
              << " iterations without convergence\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

// ---- exact

struct ExactArgs {
  GraphFiles g1, g2;
  std::string variant = "bj";
  std::string out;
};

int cmd_exact(const ExactArgs& a) {
  RunManifest m;
  m.add("command", "exact");
  m.add("manifest", manifest_path(a.out));
  m.add("variant", a.variant);
  auto t0 = Clock::now();
  const auto g1 = load(a.g1, &m, "g1");
  const auto g2 = load(a.g2, &m, "g2");
  m.add("load_ms", format_ms(ms_since(t0)), false);
  t0 = Clock::now();
  const auto r = exact_maximal_relation(g1, g2, parse_variant(a.variant));
  m.add("compute_ms", format_ms(ms_since(t0)), false);
  m.add("pairs", std::to_string(r.size()));
  std::ostringstream body;
  for (const auto& [u, v] : r.pairs()) {
    body << g1.name(u) << '\t' << g2.name(v) << '\n';
  }
  emit(a.out, m, body.str());
  return kExitOk;
}

// ---- compat

struct CompatArgs {
  std::string measure;
  GraphFiles g;
  CompatOptions opt;
  std::string normalizer = "rop";
  std::string out;
};

int cmd_compat(const CompatArgs& a) {
  RunManifest m;
  m.add("command", "compat");
  m.add("manifest", manifest_path(a.out));
  m.add("measure", a.measure);
  m.add("decay", format_param(a.opt.decay));
  m.add("epsilon", format_param(a.opt.epsilon));
  m.add("max_iterations", std::to_string(a.opt.cap()));
  m.add("workers", std::to_string(a.opt.workers), false);
  if (a.measure == "rolesim") m.add("normalizer", a.normalizer);
  auto t0 = Clock::now();
  const auto g = load(a.g, &m, "g");
  m.add("load_ms", format_ms(ms_since(t0)), false);
  t0 = Clock::now();
  const auto result =
      a.measure == "simrank"
          ? run_simrank(g, a.opt)
          : run_rolesim(g, parse_rolesim_normalizer(a.normalizer), a.opt);
  m.add("compute_ms", format_ms(ms_since(t0)), false);
  m.add("candidates", std::to_string(result.scores.size()));
  m.add("iterations", std::to_string(result.report.iterations));
  m.add("converged", result.report.converged ? "true" : "false");
  emit(a.out, m, render_scores(result.scores, g, g));
  return result.report.converged ? kExitOk : kExitNotConverged;
}

// ---- topk

struct TopkArgs {
  GraphFiles g1, g2;
  std::string scores;
  std::string node;
  std::size_t k = 5;
};

int cmd_topk(const TopkArgs& a) {
  const auto g1 = load(a.g1, nullptr, "");
  const auto g2 = load(a.g2, nullptr, "");
  std::istringstream in(read_file(a.scores));
  const auto table = read_scores(in, g1, g2, a.scores);
  const auto u = g1.find(a.node);
  if (!u) throw ValidationError("unknown node '" + a.node + "'");
  for (const auto& r : top_k(table, *u, a.k)) {
    std::cout << g2.name(r.node) << '\t' << format_score(r.score) << '\n';
  }
  return kExitOk;
}

// ---- align

struct AlignArgs {
  GraphFiles g1, g2;
  std::string scores;
  std::string truth;
  bool per_node = false;
};

int cmd_align(const AlignArgs& a) {
  const auto g1 = load(a.g1, nullptr, "");
  const auto g2 = load(a.g2, nullptr, "");
  std::istringstream sin(read_file(a.scores));
  const auto table = read_scores(sin, g1, g2, a.scores);
  std::istringstream tin(read_file(a.truth));
  const auto truth = read_truth(tin, g1, g2, a.truth);
  const auto r = align(table, truth);
  std::cout << "f1\t" << format_score(r.f1) << '\n';
  if (a.per_node) {
    std::cout << "node\tcandidates\tprecision\trecall\n";
    for (NodeId u = 0; u < g1.num_nodes(); ++u) {
      std::cout << g1.name(u) << '\t';
      for (std::size_t i = 0; i < r.candidates[u].size(); ++i) {
        std::cout << (i ? "," : "") << g2.name(r.candidates[u][i]);
      }
      std::cout << '\t' << format_score(r.precision[u]) << '\t'
                << format_score(r.recall[u]) << '\n';
    }
  }
  return kExitOk;
}

// ---- noise

struct NoiseArgs {
  GraphFiles g;
  double add = 0.0, del = 0.0, label_err = 0.0;
  std::uint64_t seed = 1;
  std::string out_edges, out_labels;
};

int cmd_noise(const NoiseArgs& a) {
  const auto g = load(a.g, nullptr, "");
  const auto r = inject_noise(g, a.add, a.del, a.label_err, a.seed);
  std::ostringstream e, l;
  write_edges(e, r.graph);
  write_labels(l, r.graph);
  write_file(a.out_edges, e.str());
  write_file(a.out_labels, l.str());
  std::cout << "edges_added\t" << r.edges_added << "\nedges_removed\t"
            << r.edges_removed << "\nlabels_erased\t" << r.labels_erased
            << "\nadditions_clamped\t" << (r.additions_clamped ? "true" : "false")
            << '\n';
  return kExitOk;
}

// ---- pearson

std::map<std::pair<std::string, std::string>, double> read_named_scores(
    const std::string& path) {
  std::map<std::pair<std::string, std::string>, double> m;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = detail::split_tabs(line);
    if (f.size() != 3) throw ParseError(path, line_no, "expected u<TAB>v<TAB>score");
    try {
      m[{std::string(f[0]), std::string(f[1])}] = std::stod(std::string(f[2]));
    } catch (const std::logic_error&) {
      throw ParseError(path, line_no, "malformed score");
    }
  }
  return m;
}

struct PearsonArgs {
  std::string a, b;
};

int cmd_pearson(const PearsonArgs& a) {
  const auto x = read_named_scores(a.a);
  const auto y = read_named_scores(a.b);
  std::vector<double> xs, ys;
  for (const auto& [key, s] : x) {
    if (auto it = y.find(key); it != y.end()) {
      xs.push_back(s);
      ys.push_back(it->second);
    }
  }
  std::cout << "pairs\t" << xs.size() << "\npearson\t" << std::setprecision(9)
            << pearson(xs, ys) << '\n';
  return kExitOk;
}

// ---- bench

struct BenchArgs {
  GraphFiles g1, g2;
  std::size_t syn_nodes = 0, syn_edges = 0, syn_labels = 0;
  std::uint64_t seed = 1;
  EngineFlags flags;
  std::string sweep = "theta";
  std::vector<double> values;
};

int cmd_bench(const BenchArgs& a) {
  std::optional<LabeledDigraph> own1, own2;
  if (a.syn_nodes > 0) {
    own1 = random_graph(a.syn_nodes, a.syn_edges, a.syn_labels, a.seed);
  } else {
    if (a.g1.edges.empty() || a.g2.edges.empty()) {
      throw ValidationError("bench needs --g1/--l1/--g2/--l2 or --synthetic-nodes");
    }
    own1 = load(a.g1, nullptr, "");
    own2 = load(a.g2, nullptr, "");
  }
  const LabeledDigraph& g1 = *own1;
  const LabeledDigraph& g2 = own2 ? *own2 : *own1;
  const auto base = a.flags.resolve();

  std::vector<double> values = a.values;
  if (values.empty()) {
    values = a.sweep == "theta" ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}
                                : std::vector<double>{1, 2, 4, 8};
  }
  auto config_for = [&](double value) {
    FSimConfig c = base;
    if (a.sweep == "theta") {
      c.theta = value;
    } else {
      if (value < 1.0) throw ValidationError("worker counts must be >= 1");
      c.workers = static_cast<std::size_t>(value);
    }
    c.validate();
    return c;
  };

  // Warm-up, excluded from the report.
  (void)iterate_to_convergence(g1, g2, config_for(values.front()));

  std::cout << "setting\tcandidates\titerations\twall_ms\tdigest\n";
  for (double value : values) {
    const auto cfg = config_for(value);
    const auto t0 = Clock::now();
    const auto result = iterate_to_convergence(g1, g2, cfg);
    const double wall = ms_since(t0);
    std::ostringstream setting;
    setting << a.sweep << '=' << value;
    std::cout << setting.str() << '\t' << result.scores.size() << '\t'
              << result.report.iterations << '\t' << format_ms(wall) << '\t'
              << sha256_hex(render_scores(result.scores, g1, g2)).substr(0, 16)
              << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional graph simulation scores"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "score all node pairs of two graphs");
  add_graph_options(c, compute.g1, "1");
  add_graph_options(c, compute.g2, "2");
  compute.flags.add(c);
  c->add_option("--out", compute.out, "score file (default stdout)");

  ExactArgs exact;
  auto* e = app.add_subcommand("exact", "maximal exact simulation relation");
  add_graph_options(e, exact.g1, "1");
  add_graph_options(e, exact.g2, "2");
  e->add_option("--variant", exact.variant, "s, dp, b or bj")
      ->check(CLI::IsMember({"s", "dp", "b", "bj"}));
  e->add_option("--out", exact.out, "pair file (default stdout)");

  CompatArgs compat;
  auto* cm = app.add_subcommand("compat", "SimRank or RoleSim on one graph");
  cm->add_option("measure", compat.measure, "simrank or rolesim")
      ->required()
      ->check(CLI::IsMember({"simrank", "rolesim"}));
  cm->add_option("--g", compat.g.edges, "edge file")->required();
  cm->add_option("--l", compat.g.labels, "label file")->required();
  cm->add_option("--decay", compat.opt.decay, "decay factor")->capture_default_str();
  cm->add_option("--normalizer", compat.normalizer, "rop or max (rolesim)")
      ->check(CLI::IsMember({"rop", "max"}));
  cm->add_option("--epsilon", compat.opt.epsilon)->capture_default_str();
  cm->add_option("--max-iter", compat.opt.max_iterations, "0 = automatic");
  cm->add_option("--workers", compat.opt.workers)->capture_default_str();
  cm->add_option("--out", compat.out, "score file (default stdout)");

  TopkArgs topk;
  auto* t = app.add_subcommand("topk", "most similar G2 nodes for one G1 node");
  add_graph_options(t, topk.g1, "1");
  add_graph_options(t, topk.g2, "2");
  t->add_option("--scores", topk.scores, "score file")->required();
  t->add_option("--node", topk.node, "G1 node name")->required();
  t->add_option("--k", topk.k)->capture_default_str();

  AlignArgs al;
  auto* a = app.add_subcommand("align", "argmax alignment F1 against a truth file");
  add_graph_options(a, al.g1, "1");
  add_graph_options(a, al.g2, "2");
  a->add_option("--scores", al.scores, "score file")->required();
  a->add_option("--truth", al.truth, "truth file (u<TAB>v)")->required();
  a->add_flag("--per-node", al.per_node, "print per-node candidates");

  NoiseArgs noise;
  auto* n = app.add_subcommand("noise", "write a noisy copy of a graph");
  n->add_option("--g", noise.g.edges, "edge file")->required();
  n->add_option("--l", noise.g.labels, "label file")->required();
  n->add_option("--add", noise.add, "edge addition rate");
  n->add_option("--del", noise.del, "edge deletion rate");
  n->add_option("--label-err", noise.label_err, "label erasure rate");
  n->add_option("--seed", noise.seed)->capture_default_str();
  n->add_option("--out-edges", noise.out_edges)->required();
  n->add_option("--out-labels", noise.out_labels)->required();

  PearsonArgs pr;
  auto* p = app.add_subcommand("pearson", "correlation of two score files");
  p->add_option("a", pr.a, "first score file")->required();
  p->add_option("b", pr.b, "second score file")->required();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "timing sweep over theta or workers");
  b->add_option("--g1", bench.g1.edges);
  b->add_option("--l1", bench.g1.labels);
  b->add_option("--g2", bench.g2.edges);
  b->add_option("--l2", bench.g2.labels);
  b->add_option("--synthetic-nodes", bench.syn_nodes, "random graph size");
  b->add_option("--synthetic-edges", bench.syn_edges);
  b->add_option("--synthetic-labels", bench.syn_labels);
  b->add_option("--seed", bench.seed)->capture_default_str();
  bench.flags.add(b);
  b->add_option("--sweep", bench.sweep, "theta or workers")
      ->check(CLI::IsMember({"theta", "workers"}))
      ->capture_default_str();
  b->add_option("--values", bench.values, "sweep values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c) return cmd_compute(compute);
    if (*e) return cmd_exact(exact);
    if (*cm) return cmd_compat(compat);
    if (*t) return cmd_topk(topk);
    if (*a) return cmd_align(al);
    if (*n) return cmd_noise(noise);
    if (*p) return cmd_pearson(pr);
    if (*b) return cmd_bench(bench);
  } catch (const ResourceError& err) {
    std::cerr << "fsim: " << err.what() << '\n';
    return kExitResource;
  } catch (const ValidationError& err) {
    std::cerr << "fsim: " << err.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& err) {
    std::cerr << "fsim: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
