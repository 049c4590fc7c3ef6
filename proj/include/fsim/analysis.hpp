// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fsim/errors.hpp"
#include "fsim/graph.hpp"
#include "fsim/score_table.hpp"

namespace fsim {

/// Sample Pearson correlation of two equally long vectors.
inline double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("pearson: vectors differ in length (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw ValidationError("pearson: need at least 2 values");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw ValidationError("pearson: correlation undefined for constant input");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Pearson over the pairs stored in both tables.
inline double pearson(const ScoreTable& a, const ScoreTable& b) {
  std::vector<double> xs, ys;
  a.for_each([&](NodeId u, NodeId v, double s) {
    if (auto t = b.find(u, v)) {
      xs.push_back(s);
      ys.push_back(*t);
    }
  });
  return pearson(xs, ys);
}

struct RankedNode {
  NodeId node;
  double score;
};

inline std::vector<RankedNode> top_k(const ScoreTable& table, NodeId u,
                                     std::size_t k) {
  if (k == 0) throw ValidationError("top_k: k must be at least 1");
  if (u >= table.keys().n1()) {
    throw ValidationError("top_k: unknown node id " + std::to_string(u));
  }
  std::vector<RankedNode> ranked;
  const auto row = table.keys().row(u);
  const auto begin = table.keys().row_begin(u);
  ranked.reserve(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    ranked.push_back({row[i], table.scores()[begin + i]});
  }
  auto better = [](const RankedNode& a, const RankedNode& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node < b.node;
  };
  if (ranked.size() > k) {
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k),
                      ranked.end(), better);
    ranked.resize(k);
  } else {
    std::sort(ranked.begin(), ranked.end(), better);
  }
  return ranked;
}

struct AlignmentResult {
  /// Argmax candidate set per V1 node, sorted by id.
  std::vector<std::vector<NodeId>> candidates;
  std::vector<double> precision;
  std::vector<double> recall;
  double f1 = 0.0;
};

/// Aligns each u to argmax_v FSim(u, v) over stored pairs and scores the
/// result against `truth` (pairs of internal ids).
inline AlignmentResult align(const ScoreTable& table,
                             std::span<const std::pair<NodeId, NodeId>> truth,
                             double tie_tolerance = 0.0) {
  const auto& keys = table.keys();
  const std::size_t n1 = keys.n1();
  std::vector<std::string> bad;
  for (const auto& [u, v] : truth) {
    if (u >= n1 || v >= keys.n2()) {
      bad.push_back("(" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
  }
  if (!bad.empty()) {
    std::string msg = "align: truth references unknown nodes:";
    for (const auto& b : bad) msg += " " + b;
    throw ValidationError(msg);
  }
  std::unordered_map<NodeId, std::vector<NodeId>> expected;
  for (const auto& [u, v] : truth) expected[u].push_back(v);

  AlignmentResult r;
  r.candidates.resize(n1);
  r.precision.assign(n1, 0.0);
  r.recall.assign(n1, 0.0);
  double total = 0.0;
  for (NodeId u = 0; u < n1; ++u) {
    const auto row = keys.row(u);
    const auto begin = keys.row_begin(u);
    if (row.empty()) continue;
    double best = table.scores()[begin];
    for (std::size_t i = 1; i < row.size(); ++i) {
      best = std::max(best, table.scores()[begin + i]);
    }
    auto& a = r.candidates[u];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (table.scores()[begin + i] >= best - tie_tolerance) a.push_back(row[i]);
    }
    auto it = expected.find(u);
    if (it == expected.end()) continue;
    const bool hit = std::any_of(it->second.begin(), it->second.end(), [&](NodeId v) {
      return std::binary_search(a.begin(), a.end(), v);
    });
    if (!hit) continue;
    r.precision[u] = 1.0 / static_cast<double>(a.size());
    r.recall[u] = 1.0;
    total += 2.0 * r.precision[u] * r.recall[u] / (r.precision[u] + r.recall[u]);
  }
  r.f1 = n1 == 0 ? 0.0 : total / static_cast<double>(n1);
  return r;
}

/// nDCG with gain = relevance and a log2(position + 1) discount. An all-zero
/// relevance list scores 0.
template <typename Item>
double ndcg(std::span<const Item> ranked,
            const std::unordered_map<Item, int>& relevance) {
  if (ranked.empty()) throw ValidationError("ndcg: ranking is empty");
  std::vector<double> gains;
  gains.reserve(ranked.size());
  for (const auto& item : ranked) {
    auto it = relevance.find(item);
    gains.push_back(it == relevance.end() ? 0.0 : static_cast<double>(it->second));
  }
  auto dcg = [](const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      s += g[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    return s;
  };
  std::vector<double> ideal = gains;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg(ideal);
  if (idcg == 0.0) return 0.0;
  return dcg(gains) / idcg;
}

inline double ndcg(std::span<const std::string> ranked,
                   const std::unordered_map<std::string, int>& relevance) {
  return ndcg<std::string>(ranked, relevance);
}

}  // namespace fsim
