// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsim/errors.hpp"
#include "fsim/graph.hpp"
#include "fsim/matching.hpp"
#include "fsim/variant.hpp"

namespace fsim {

/// A relation R ⊆ V1 × V2 stored as a dense bitmap.
class SimulationRelation {
 public:
  SimulationRelation() = default;
  SimulationRelation(Variant variant, std::size_t n1, std::size_t n2)
      : variant_(variant), n1_(n1), n2_(n2), bits_(n1 * n2, 0) {}

  Variant variant() const { return variant_; }
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }

  bool contains(NodeId u, NodeId v) const { return bits_[u * n2_ + v] != 0; }
  void set(NodeId u, NodeId v, bool value) { bits_[u * n2_ + v] = value; }

  std::size_t size() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }

  /// Pairs in (u, v) internal-id order.
  std::vector<std::pair<NodeId, NodeId>> pairs() const {
    std::vector<std::pair<NodeId, NodeId>> result;
    for (NodeId u = 0; u < n1_; ++u) {
      for (NodeId v = 0; v < n2_; ++v) {
        if (contains(u, v)) result.emplace_back(u, v);
      }
    }
    return result;
  }

  /// True iff every pair of this relation is also in `other`.
  bool subset_of(const SimulationRelation& other) const {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] && !other.bits_[i]) return false;
    }
    return true;
  }

  friend bool operator==(const SimulationRelation& a,
                         const SimulationRelation& b) {
    return a.n1_ == b.n1_ && a.n2_ == b.n2_ && a.bits_ == b.bits_;
  }

 private:
  Variant variant_ = Variant::kS;
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::vector<char> bits_;
};

namespace detail {

// ∀x ∈ s1 ∃y ∈ s2 with (x, y) ∈ R.
inline bool every_left_has_witness(std::span<const NodeId> s1,
                                   std::span<const NodeId> s2,
                                   const SimulationRelation& r) {
  return std::all_of(s1.begin(), s1.end(), [&](NodeId x) {
    return std::any_of(s2.begin(), s2.end(),
                       [&](NodeId y) { return r.contains(x, y); });
  });
}

// ∀y ∈ s2 ∃x ∈ s1 with (x, y) ∈ R.
inline bool every_right_has_witness(std::span<const NodeId> s1,
                                    std::span<const NodeId> s2,
                                    const SimulationRelation& r) {
  return std::all_of(s2.begin(), s2.end(), [&](NodeId y) {
    return std::any_of(s1.begin(), s1.end(),
                       [&](NodeId x) { return r.contains(x, y); });
  });
}

// Maximum matching size between s1 and s2 using only pairs in R.
inline std::size_t relation_matching_size(std::span<const NodeId> s1,
                                          std::span<const NodeId> s2,
                                          const SimulationRelation& r) {
  std::vector<std::vector<int>> adj(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    for (std::size_t j = 0; j < s2.size(); ++j) {
      if (r.contains(s1[i], s2[j])) adj[i].push_back(static_cast<int>(j));
    }
  }
  return matching_size(max_cardinality_matching(s2.size(), adj));
}

inline bool neighbor_condition(Variant variant, std::span<const NodeId> s1,
                               std::span<const NodeId> s2,
                               const SimulationRelation& r) {
  switch (variant) {
    case Variant::kS:
      return every_left_has_witness(s1, s2, r);
    case Variant::kB:
      return every_left_has_witness(s1, s2, r) &&
             every_right_has_witness(s1, s2, r);
    case Variant::kDp:
      if (s1.size() > s2.size()) return false;
      return relation_matching_size(s1, s2, r) == s1.size();
    case Variant::kBj:
      if (s1.size() != s2.size()) return false;
      return relation_matching_size(s1, s2, r) == s1.size();
  }
  return false;
}

}  // namespace detail

/// True iff (u, v) satisfies the label condition and the variant's neighbor
/// conditions with witnesses drawn from `r`.
inline bool satisfies_conditions(const LabeledDigraph& g1,
                                 const LabeledDigraph& g2, Variant variant,
                                 NodeId u, NodeId v,
                                 const SimulationRelation& r) {
  if (g1.label_name(u) != g2.label_name(v)) return false;
  return detail::neighbor_condition(variant, g1.out(u), g2.out(v), r) &&
         detail::neighbor_condition(variant, g1.in(u), g2.in(v), r);
}

/// The maximal χ-simulation between g1 and g2 as a greatest fixpoint: start
/// from all label-equal pairs and drop violators until none remain.
inline SimulationRelation exact_maximal_relation(const LabeledDigraph& g1,
                                                 const LabeledDigraph& g2,
                                                 Variant variant) {
  const auto n1 = g1.num_nodes();
  const auto n2 = g2.num_nodes();
  SimulationRelation r(variant, n1, n2);
  for (NodeId u = 0; u < n1; ++u) {
    for (NodeId v = 0; v < n2; ++v) {
      if (g1.label_name(u) == g2.label_name(v)) r.set(u, v, true);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId u = 0; u < n1; ++u) {
      for (NodeId v = 0; v < n2; ++v) {
        if (r.contains(u, v) &&
            !satisfies_conditions(g1, g2, variant, u, v, r)) {
          r.set(u, v, false);
          changed = true;
        }
      }
    }
  }
  return r;
}

/// Whether u is χ-simulated by v.
inline bool check_pair(const LabeledDigraph& g1, const LabeledDigraph& g2,
                       Variant variant, NodeId u, NodeId v) {
  if (u >= g1.num_nodes() || v >= g2.num_nodes()) {
    throw ValidationError("check_pair: unknown node id");
  }
  return exact_maximal_relation(g1, g2, variant).contains(u, v);
}

// ---------------------------------------------------------------------------
// k-bisimulation signatures

/// Per-node level-k signatures; equal signatures ⇔ k-bisimilar.
struct SignatureMap {
  std::size_t level = 0;
  std::vector<std::uint64_t> sig;

  /// Number of distinct signatures.
  std::size_t num_classes() const {
    auto copy = sig;
    std::sort(copy.begin(), copy.end());
    return static_cast<std::size_t>(
        std::unique(copy.begin(), copy.end()) - copy.begin());
  }
};

namespace detail {

// 64-bit mixing over a canonical word sequence (splitmix64 finalizer chained
// FNV-style). Collision odds for n signatures are about n^2 / 2^65.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_words(std::span<const std::uint64_t> words) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ words.size();
  for (auto w : words) h = mix64(h ^ mix64(w));
  return h;
}

inline std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

}  // namespace detail

/// sig_0(u) = hash(ℓ(u)); sig_k(u) = hash(sig_{k-1}(u), sorted set of
/// sig_{k-1} over out-neighbors).
inline SignatureMap kbisim_signatures(const LabeledDigraph& g,
                                      std::size_t k) {
  const auto n = g.num_nodes();
  SignatureMap m;
  m.sig.resize(n);
  for (NodeId u = 0; u < n; ++u) {
    m.sig[u] = detail::hash_string(g.label_name(u));
  }
  std::vector<std::uint64_t> next(n), words;
  for (std::size_t level = 1; level <= k; ++level) {
    for (NodeId u = 0; u < n; ++u) {
      words.clear();
      for (NodeId x : g.out(u)) words.push_back(m.sig[x]);
      std::sort(words.begin(), words.end());
      words.erase(std::unique(words.begin(), words.end()), words.end());
      words.insert(words.begin(), m.sig[u]);
      next[u] = detail::hash_words(words);
    }
    std::swap(m.sig, next);
  }
  m.level = k;
  return m;
}

// ---------------------------------------------------------------------------
// Weisfeiler-Lehman color refinement

struct WLColoring {
  /// Stable colors over the undirected views, dense ids shared by both graphs.
  std::vector<std::uint32_t> colors1;
  std::vector<std::uint32_t> colors2;
  /// Refinement rounds until the joint partition stopped splitting.
  std::size_t rounds = 0;
  /// Joint partition after each round, round 0 being the label partition.
  std::vector<std::vector<std::uint32_t>> history;
};

/// 1-WL refinement on the disjoint union of the undirected views of g1 and
/// g2 (adjacency = out ∪ in), with multiset neighbor colors.
inline WLColoring wl_colors(const LabeledDigraph& g1, const LabeledDigraph& g2) {
  const auto n1 = g1.num_nodes();
  const auto n = n1 + g2.num_nodes();
  std::vector<std::vector<NodeId>> adj(n);
  std::vector<std::uint32_t> color(n);
  {
    std::map<std::string, std::uint32_t> label_color;
    auto color_of = [&](const std::string& label) {
      return label_color
          .emplace(label, static_cast<std::uint32_t>(label_color.size()))
          .first->second;
    };
    // Assign label colors in sorted order so ids do not depend on node order.
    for (const auto& l : g1.label_dict()) label_color.emplace(l, 0);
    for (const auto& l : g2.label_dict()) label_color.emplace(l, 0);
    std::uint32_t next = 0;
    for (auto& [label, c] : label_color) c = next++;
    for (NodeId u = 0; u < n1; ++u) {
      color[u] = color_of(g1.label_name(u));
      adj[u] = undirected_neighbors(g1, u);
    }
    for (NodeId v = 0; v < g2.num_nodes(); ++v) {
      color[n1 + v] = color_of(g2.label_name(v));
      auto nb = undirected_neighbors(g2, v);
      for (auto& x : nb) x += static_cast<NodeId>(n1);
      adj[n1 + v] = std::move(nb);
    }
  }
  auto count_classes = [](const std::vector<std::uint32_t>& c) {
    auto copy = c;
    std::sort(copy.begin(), copy.end());
    return static_cast<std::size_t>(
        std::unique(copy.begin(), copy.end()) - copy.begin());
  };

  WLColoring result;
  result.history.push_back(color);
  std::size_t classes = count_classes(color);
  for (std::size_t round = 1; round <= n + 1; ++round) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> dictionary;
    std::vector<std::vector<std::uint32_t>> keys(n);
    for (std::size_t u = 0; u < n; ++u) {
      auto& key = keys[u];
      key.reserve(adj[u].size() + 1);
      for (NodeId x : adj[u]) key.push_back(color[x]);
      std::sort(key.begin(), key.end());
      key.insert(key.begin(), color[u]);
      dictionary.emplace(key, 0);
    }
    std::uint32_t next = 0;
    for (auto& [key, c] : dictionary) c = next++;
    std::vector<std::uint32_t> refined(n);
    for (std::size_t u = 0; u < n; ++u) refined[u] = dictionary.at(keys[u]);
    const std::size_t refined_classes = count_classes(refined);
    if (refined_classes == classes) break;
    color = std::move(refined);
    classes = refined_classes;
    result.rounds = round;
    result.history.push_back(color);
  }
  result.colors1.assign(color.begin(), color.begin() + n1);
  result.colors2.assign(color.begin() + n1, color.end());
  return result;
}

}  // namespace fsim
