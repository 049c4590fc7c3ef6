// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <memory>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fsim/config.hpp"
#include "fsim/engine.hpp"
#include "fsim/errors.hpp"
#include "fsim/graph.hpp"

namespace fsim {

/// Fixed six-decimal rendering used by every score file.
inline std::string format_score(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", s);
  return buf;
}

/// Shortest text that reads back to the same double.
inline std::string format_param(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

/// Key/value lines describing one run. Rendered as `# key<TAB>value` in score
/// file headers and as plain `key<TAB>value` in the standalone manifest.
/// Entries marked manifest-only (timings, worker count) stay out of score
/// file headers so score files are reproducible byte for byte.
struct RunManifest {
  struct Entry {
    std::string key;
    std::string value;
    bool in_header = true;
  };
  std::vector<Entry> entries;

  void add(std::string key, std::string value, bool in_header = true) {
    entries.push_back({std::move(key), std::move(value), in_header});
  }
  void write_header(std::ostream& out) const {
    for (const auto& e : entries) {
      if (e.in_header) out << "# " << e.key << '\t' << e.value << '\n';
    }
  }
  void write_tsv(std::ostream& out) const {
    out << "key\tvalue\n";
    for (const auto& e : entries) out << e.key << '\t' << e.value << '\n';
  }
};

inline void add_config(RunManifest& m, const FSimConfig& cfg) {
  m.add("variant", std::string(to_string(cfg.variant)));
  m.add("w_plus", format_param(cfg.w_plus));
  m.add("w_minus", format_param(cfg.w_minus));
  m.add("label_fn", std::string(to_string(cfg.label_fn)));
  m.add("theta", format_param(cfg.theta));
  m.add("epsilon", format_param(cfg.epsilon));
  m.add("convergence", std::string(to_string(cfg.convergence)));
  m.add("max_iterations", std::to_string(cfg.iteration_cap()));
  m.add("ub", cfg.ub_enabled ? "on" : "off");
  m.add("alpha", format_param(cfg.alpha));
  m.add("beta", format_param(cfg.beta));
  m.add("matching", std::string(to_string(cfg.matching)));
  m.add("workers", std::to_string(cfg.workers), false);
}

/// `u<TAB>v<TAB>score` in (u, v) internal-id order with external names.
inline void write_scores(std::ostream& out, const ScoreTable& table,
                         const LabeledDigraph& g1, const LabeledDigraph& g2) {
  table.for_each([&](NodeId u, NodeId v, double s) {
    out << g1.name(u) << '\t' << g2.name(v) << '\t' << format_score(s) << '\n';
  });
}

/// Reads a score file written by write_scores back into a table keyed by the
/// internal ids of g1 and g2.
inline ScoreTable read_scores(std::istream& in, const LabeledDigraph& g1,
                              const LabeledDigraph& g2,
                              const std::string& source = "scores") {
  std::vector<std::tuple<NodeId, NodeId, double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = detail::split_tabs(line);
    if (f.size() != 3) {
      throw ParseError(source, line_no, "expected u<TAB>v<TAB>score");
    }
    auto u = g1.find(std::string(f[0]));
    auto v = g2.find(std::string(f[1]));
    if (!u || !v) throw ParseError(source, line_no, "unknown node name");
    double s = 0.0;
    auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), s);
    if (ec != std::errc{} || p != f[2].data() + f[2].size()) {
      throw ParseError(source, line_no, "malformed score");
    }
    rows.emplace_back(*u, *v, s);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const auto& a, const auto& b) {
                           return std::get<0>(a) == std::get<0>(b) &&
                                  std::get<1>(a) == std::get<1>(b);
                         }),
             rows.end());
  const auto n1 = g1.num_nodes();
  std::vector<std::size_t> offsets(n1 + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> scores;
  for (const auto& [u, v, s] : rows) {
    ++offsets[u + 1];
    cols.push_back(v);
    scores.push_back(s);
  }
  for (std::size_t u = 0; u < n1; ++u) offsets[u + 1] += offsets[u];
  auto keys = std::make_shared<CandidateIndex>(n1, g2.num_nodes(),
                                               std::move(offsets), std::move(cols));
  return ScoreTable(std::move(keys), std::move(scores), 0);
}

/// Reads `u<TAB>v` name pairs and resolves them against g1 and g2. Unknown
/// names are collected into one ValidationError.
inline std::vector<std::pair<NodeId, NodeId>> read_truth(
    std::istream& in, const LabeledDigraph& g1, const LabeledDigraph& g2,
    const std::string& source = "truth") {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::vector<std::string> unknown;
  detail::for_each_pair_line(
      in, source, [&](std::string_view a, std::string_view b, std::size_t) {
        auto u = g1.find(std::string(a));
        auto v = g2.find(std::string(b));
        if (!u) unknown.emplace_back(a);
        if (!v) unknown.emplace_back(b);
        if (u && v) pairs.emplace_back(*u, *v);
      });
  if (!unknown.empty()) {
    std::string msg = "truth references unknown nodes:";
    for (const auto& s : unknown) msg += " " + s;
    throw ValidationError(msg);
  }
  return pairs;
}

/// Reads `item<TAB>grade` with grades in {0, 1, 2}.
inline std::unordered_map<std::string, int> read_relevance(
    std::istream& in, const std::string& source = "relevance") {
  std::unordered_map<std::string, int> rel;
  detail::for_each_pair_line(
      in, source, [&](std::string_view item, std::string_view g, std::size_t line) {
        if (g != "0" && g != "1" && g != "2") {
          throw ParseError(source, line, "grade must be 0, 1 or 2");
        }
        rel[std::string(item)] = g[0] - '0';
      });
  return rel;
}

}  // namespace fsim
