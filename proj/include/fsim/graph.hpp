// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fsim/errors.hpp"

namespace fsim {

using NodeId = std::uint32_t;
using LabelId = std::uint32_t;

/// Label assigned to nodes that appear only in the edge file, and to nodes
/// whose label was erased by noise injection.
inline constexpr std::string_view kEmptyLabel{};

struct Edge {
  NodeId src;
  NodeId dst;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct DegreeStats {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t max_out = 0;
  std::size_t max_in = 0;

  /// |E| / |V|, zero for the empty graph.
  double avg_degree() const {
    return num_nodes == 0 ? 0.0
                          : static_cast<double>(num_edges) /
                                static_cast<double>(num_nodes);
  }
};

/// Immutable node-labeled directed graph with CSR out/in adjacency.
///
/// Node ids are dense (0..n-1); external string ids are kept for I/O. Both
/// adjacency lists are sorted and duplicate-free, and mirror each other.
class LabeledDigraph {
 public:
  LabeledDigraph() = default;

  /// Builds a graph from per-node external names and label strings plus an
  /// edge list over dense ids. Duplicate edges are collapsed.
  static LabeledDigraph build(std::vector<std::string> names,
                              const std::vector<std::string>& node_labels,
                              std::vector<Edge> edges) {
    if (names.size() != node_labels.size()) {
      throw ValidationError("names and labels differ in length");
    }
    LabeledDigraph g;
    const auto n = names.size();
    if (n > std::numeric_limits<NodeId>::max()) {
      throw ValidationError("too many nodes");
    }
    g.names_ = std::move(names);
    g.name_index_.reserve(n);
    for (NodeId u = 0; u < n; ++u) {
      if (!g.name_index_.emplace(g.names_[u], u).second) {
        throw ValidationError("duplicate node id '" + g.names_[u] + "'");
      }
    }
    std::unordered_map<std::string, LabelId> label_ids;
    g.labels_.resize(n);
    for (NodeId u = 0; u < n; ++u) {
      auto [it, inserted] = label_ids.emplace(
          node_labels[u], static_cast<LabelId>(g.label_dict_.size()));
      if (inserted) g.label_dict_.push_back(node_labels[u]);
      g.labels_[u] = it->second;
    }
    for (const auto& e : edges) {
      if (e.src >= n || e.dst >= n) {
        throw ValidationError("edge references node id out of range");
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.num_edges_ = edges.size();

    g.out_offsets_.assign(n + 1, 0);
    g.in_offsets_.assign(n + 1, 0);
    for (const auto& e : edges) {
      ++g.out_offsets_[e.src + 1];
      ++g.in_offsets_[e.dst + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      g.out_offsets_[i + 1] += g.out_offsets_[i];
      g.in_offsets_[i + 1] += g.in_offsets_[i];
    }
    g.out_targets_.resize(edges.size());
    g.in_sources_.resize(edges.size());
    std::vector<std::size_t> out_pos(g.out_offsets_.begin(),
                                     g.out_offsets_.end() - 1);
    std::vector<std::size_t> in_pos(g.in_offsets_.begin(),
                                    g.in_offsets_.end() - 1);
    // Edges are sorted by (src, dst), so both fills come out sorted.
    for (const auto& e : edges) {
      g.out_targets_[out_pos[e.src]++] = e.dst;
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.dst, a.src) < std::pair(b.dst, b.src);
    });
    for (const auto& e : edges) {
      g.in_sources_[in_pos[e.dst]++] = e.src;
    }
    return g;
  }

  std::size_t num_nodes() const { return labels_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  std::size_t num_labels() const { return label_dict_.size(); }

  std::span<const NodeId> out(NodeId u) const {
    return {out_targets_.data() + out_offsets_[u],
            out_offsets_[u + 1] - out_offsets_[u]};
  }
  std::span<const NodeId> in(NodeId u) const {
    return {in_sources_.data() + in_offsets_[u],
            in_offsets_[u + 1] - in_offsets_[u]};
  }
  std::size_t out_degree(NodeId u) const {
    return out_offsets_[u + 1] - out_offsets_[u];
  }
  std::size_t in_degree(NodeId u) const {
    return in_offsets_[u + 1] - in_offsets_[u];
  }
  bool has_edge(NodeId u, NodeId v) const {
    auto o = out(u);
    return std::binary_search(o.begin(), o.end(), v);
  }

  LabelId label(NodeId u) const { return labels_[u]; }
  const std::string& label_name(NodeId u) const {
    return label_dict_[labels_[u]];
  }
  const std::vector<std::string>& label_dict() const { return label_dict_; }
  const std::vector<LabelId>& labels() const { return labels_; }

  const std::string& name(NodeId u) const { return names_[u]; }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<NodeId> find(const std::string& name) const {
    auto it = name_index_.find(name);
    if (it == name_index_.end()) return std::nullopt;
    return it->second;
  }

  /// All edges in (src, dst) order.
  std::vector<Edge> edges() const {
    std::vector<Edge> result;
    result.reserve(num_edges_);
    for (NodeId u = 0; u < num_nodes(); ++u) {
      for (NodeId v : out(u)) result.push_back({u, v});
    }
    return result;
  }

  std::vector<std::string> node_label_strings() const {
    std::vector<std::string> result(num_nodes());
    for (NodeId u = 0; u < num_nodes(); ++u) result[u] = label_name(u);
    return result;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> name_index_;
  std::vector<LabelId> labels_;
  std::vector<std::string> label_dict_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<NodeId> in_sources_;
  std::size_t num_edges_ = 0;
};

/// Convenience constructor for tests and generators: nodes are named by their
/// dense id ("0", "1", ...).
inline LabeledDigraph make_graph(const std::vector<std::string>& node_labels,
                                 std::vector<Edge> edges) {
  std::vector<std::string> names(node_labels.size());
  for (std::size_t i = 0; i < names.size(); ++i) names[i] = std::to_string(i);
  return LabeledDigraph::build(std::move(names), node_labels,
                               std::move(edges));
}

inline DegreeStats degree_stats(const LabeledDigraph& g) {
  DegreeStats s;
  s.num_nodes = g.num_nodes();
  s.num_edges = g.num_edges();
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    s.max_out = std::max(s.max_out, g.out_degree(u));
    s.max_in = std::max(s.max_in, g.in_degree(u));
  }
  return s;
}

/// Symmetric closure: every edge is present in both directions, so out- and
/// in-neighbors both equal the undirected neighborhood.
inline LabeledDigraph undirected_view(const LabeledDigraph& g) {
  auto edges = g.edges();
  const auto m = edges.size();
  edges.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    edges.push_back({edges[i].dst, edges[i].src});
  }
  return LabeledDigraph::build(g.names(), g.node_label_strings(),
                               std::move(edges));
}

/// out(u) ∪ in(u), sorted.
inline std::vector<NodeId> undirected_neighbors(const LabeledDigraph& g,
                                                NodeId u) {
  std::vector<NodeId> result;
  auto o = g.out(u);
  auto i = g.in(u);
  std::set_union(o.begin(), o.end(), i.begin(), i.end(),
                 std::back_inserter(result));
  return result;
}

// ---------------------------------------------------------------------------
// TSV loading and serialization

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

/// Reads `a<TAB>b` records, skipping blank and '#' lines. Calls
/// `fn(a, b, line_no)` per record.
template <typename Fn>
void for_each_pair_line(std::istream& in, std::string_view source, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw ParseError(std::string(source), line_no,
                       "expected 2 tab-separated fields, got " +
                           std::to_string(fields.size()));
    }
    fn(fields[0], fields[1], line_no);
  }
}

}  // namespace detail

/// Loads a graph from an edge stream (`src<TAB>dst`) and a label stream
/// (`node<TAB>label`). Ids are assigned in first-appearance order of the
/// label stream, then the edge stream.
inline LabeledDigraph load_graph(std::istream& edge_source,
                                 std::istream& label_source) {
  std::vector<std::string> names;
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> index;

  auto intern = [&](std::string_view name) -> NodeId {
    auto [it, inserted] =
        index.emplace(std::string(name), static_cast<NodeId>(names.size()));
    if (inserted) {
      names.emplace_back(name);
      labels.emplace_back(kEmptyLabel);
    }
    return it->second;
  };

  std::unordered_set<NodeId> labeled;
  detail::for_each_pair_line(
      label_source, "label file",
      [&](std::string_view node, std::string_view label, std::size_t line_no) {
        NodeId u = intern(node);
        if (!labeled.insert(u).second) {
          if (labels[u] != label) {
            throw ValidationError("conflicting labels for node '" +
                                  std::string(node) + "' at label line " +
                                  std::to_string(line_no) + ": '" +
                                  labels[u] + "' vs '" + std::string(label) +
                                  "'");
          }
          return;
        }
        labels[u] = std::string(label);
      });

  std::vector<Edge> edges;
  detail::for_each_pair_line(
      edge_source, "edge file",
      [&](std::string_view src, std::string_view dst, std::size_t) {
        NodeId s = intern(src);
        NodeId d = intern(dst);
        edges.push_back({s, d});
      });

  return LabeledDigraph::build(std::move(names), labels, std::move(edges));
}

/// Writes edges in (src, dst) internal-id order using external ids.
inline void write_edges(std::ostream& out, const LabeledDigraph& g) {
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.out(u)) out << g.name(u) << '\t' << g.name(v) << '\n';
  }
}

/// Writes one label line per node in internal-id order.
inline void write_labels(std::ostream& out, const LabeledDigraph& g) {
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    out << g.name(u) << '\t' << g.label_name(u) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Noise injection and synthetic graphs

struct NoiseResult {
  LabeledDigraph graph;
  std::size_t edges_added = 0;
  std::size_t edges_removed = 0;
  std::size_t labels_erased = 0;
  /// Requested additions exceeded the number of absent edges.
  bool additions_clamped = false;
};

/// Removes ⌊del·|E|⌋ random edges, adds ⌊add·|E|⌋ random edges absent from
/// the input, and erases ⌊label·|V|⌋ random labels. Deterministic per seed.
inline NoiseResult inject_noise(const LabeledDigraph& g, double edge_add_rate,
                                double edge_del_rate, double label_err_rate,
                                std::uint64_t seed) {
  for (double r : {edge_add_rate, edge_del_rate, label_err_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw ValidationError("noise rates must lie in [0,1]");
    }
  }
  std::mt19937_64 rng(seed);
  const auto n = g.num_nodes();
  const auto m = g.num_edges();
  NoiseResult result;

  auto edges = g.edges();
  const auto n_del = static_cast<std::size_t>(
      std::floor(edge_del_rate * static_cast<double>(m)));
  std::shuffle(edges.begin(), edges.end(), rng);
  edges.resize(m - std::min(n_del, m));
  result.edges_removed = m - edges.size();

  auto n_add = static_cast<std::size_t>(
      std::floor(edge_add_rate * static_cast<double>(m)));
  const std::size_t capacity = n * n - m;
  if (n_add > capacity) {
    n_add = capacity;
    result.additions_clamped = true;
  }
  if (n_add > 0) {
    if (n_add * 2 > capacity) {
      // Dense request: enumerate the complement and sample from it.
      std::vector<Edge> absent;
      absent.reserve(capacity);
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = 0; v < n; ++v) {
          if (!g.has_edge(u, v)) absent.push_back({u, v});
        }
      }
      std::shuffle(absent.begin(), absent.end(), rng);
      edges.insert(edges.end(), absent.begin(), absent.begin() + n_add);
    } else {
      std::unordered_set<std::uint64_t> added;
      std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
      while (added.size() < n_add) {
        NodeId u = pick(rng);
        NodeId v = pick(rng);
        if (g.has_edge(u, v)) continue;
        if (added.insert((std::uint64_t{u} << 32) | v).second) {
          edges.push_back({u, v});
        }
      }
    }
  }
  result.edges_added = n_add;

  auto labels = g.node_label_strings();
  const auto n_lab = static_cast<std::size_t>(
      std::floor(label_err_rate * static_cast<double>(n)));
  std::vector<NodeId> order(n);
  for (NodeId u = 0; u < n; ++u) order[u] = u;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < n_lab; ++i) labels[order[i]] = kEmptyLabel;
  result.labels_erased = n_lab;

  result.graph = LabeledDigraph::build(g.names(), labels, std::move(edges));
  return result;
}

/// Uniform random labeled digraph with exactly `num_edges` distinct edges
/// (self-loops allowed) and labels "L0".."L{k-1}".
inline LabeledDigraph random_graph(std::size_t num_nodes,
                                   std::size_t num_edges,
                                   std::size_t num_labels, std::uint64_t seed) {
  if (num_nodes == 0 || num_labels == 0) {
    throw ValidationError("random_graph needs nodes and labels");
  }
  if (num_edges > num_nodes * num_nodes) {
    throw ValidationError("random_graph: too many edges requested");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_label(0, num_labels - 1);
  std::vector<std::string> labels(num_nodes);
  for (auto& l : labels) l = "L" + std::to_string(pick_label(rng));
  std::uniform_int_distribution<NodeId> pick(0,
                                             static_cast<NodeId>(num_nodes - 1));
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  edges.reserve(num_edges);
  while (edges.size() < num_edges) {
    NodeId u = pick(rng);
    NodeId v = pick(rng);
    if (seen.insert((std::uint64_t{u} << 32) | v).second) {
      edges.push_back({u, v});
    }
  }
  return make_graph(labels, std::move(edges));
}

/// Erdős–Rényi style digraph: each ordered pair (including self-loops) is an
/// edge with probability `edge_prob`.
inline LabeledDigraph random_gnp_graph(std::size_t num_nodes, double edge_prob,
                                       std::size_t num_labels,
                                       std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick_label(0, num_labels - 1);
  std::bernoulli_distribution coin(edge_prob);
  std::vector<std::string> labels(num_nodes);
  for (auto& l : labels) l = "L" + std::to_string(pick_label(rng));
  std::vector<Edge> edges;
  for (NodeId u = 0; u < num_nodes; ++u) {
    for (NodeId v = 0; v < num_nodes; ++v) {
      if (coin(rng)) edges.push_back({u, v});
    }
  }
  return make_graph(labels, std::move(edges));
}

}  // namespace fsim
