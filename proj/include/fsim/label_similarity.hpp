// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsim/errors.hpp"
#include "fsim/graph.hpp"

namespace fsim {

enum class LabelFn { kIndicator, kEdit, kJaroWinkler };

inline std::string_view to_string(LabelFn fn) {
  switch (fn) {
    case LabelFn::kIndicator: return "indicator";
    case LabelFn::kEdit: return "edit";
    case LabelFn::kJaroWinkler: return "jw";
  }
  return "?";
}

inline LabelFn parse_label_fn(std::string_view s) {
  if (s == "indicator") return LabelFn::kIndicator;
  if (s == "edit") return LabelFn::kEdit;
  if (s == "jw") return LabelFn::kJaroWinkler;
  throw ConfigError("unknown label function '" + std::string(s) +
                    "' (expected indicator, edit or jw)");
}

/// Levenshtein distance with unit costs, two-row DP.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// 1 - edit(a,b) / max(|a|,|b|); 1 when both are empty.
inline double normalized_edit_similarity(std::string_view a,
                                         std::string_view b) {
  const auto longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) /
                   static_cast<double>(longest);
}

inline double jaro_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t longest = std::max(a.size(), b.size());
  const std::size_t window = longest / 2 > 0 ? longest / 2 - 1 : 0;

  std::vector<bool> a_matched(a.size(), false), b_matched(b.size(), false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(i + window + 1, b.size());
    for (std::size_t j = lo; j < hi; ++j) {
      if (b_matched[j] || a[i] != b[j]) continue;
      a_matched[i] = b_matched[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;

  std::size_t half_transpositions = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[k]) ++k;
    if (a[i] != b[k]) ++half_transpositions;
    ++k;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions) / 2.0;
  return (m / static_cast<double>(a.size()) +
          m / static_cast<double>(b.size()) + (m - t) / m) /
         3.0;
}

/// Jaro-Winkler with prefix scale 0.1 and prefix length capped at 4.
inline double jaro_winkler_similarity(std::string_view a, std::string_view b) {
  // Shorter string first (then lexicographic) keeps the score symmetric.
  if (b.size() < a.size() || (b.size() == a.size() && b < a)) std::swap(a, b);
  const double jaro = jaro_similarity(a, b);
  std::size_t prefix = 0;
  const std::size_t cap = std::min<std::size_t>({4, a.size(), b.size()});
  while (prefix < cap && a[prefix] == b[prefix]) ++prefix;
  double score = jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
  // Distinct strings never reach 1: Winkler's boost can round up to exactly 1
  // for near-identical long strings, which would break definiteness.
  if (score >= 1.0 && a != b) score = std::nextafter(1.0, 0.0);
  return score;
}

inline double label_sim(LabelFn fn, std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  switch (fn) {
    case LabelFn::kIndicator: return 0.0;
    case LabelFn::kEdit: return normalized_edit_similarity(a, b);
    case LabelFn::kJaroWinkler: return jaro_winkler_similarity(a, b);
  }
  return 0.0;
}

/// Label similarity between the label dictionaries of two graphs. Dense
/// when the dictionary product is small enough, otherwise computed on demand.
class LabelSimMatrix {
 public:
  static constexpr std::size_t kDenseLimit = std::size_t{1} << 24;

  LabelSimMatrix(LabelFn fn, const LabeledDigraph& g1, const LabeledDigraph& g2)
      : fn_(fn), dict1_(&g1.label_dict()), dict2_(&g2.label_dict()) {
    const auto n1 = dict1_->size();
    const auto n2 = dict2_->size();
    if (n1 * n2 <= kDenseLimit) {
      dense_.resize(n1 * n2);
      for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
          dense_[i * n2 + j] = label_sim(fn, (*dict1_)[i], (*dict2_)[j]);
        }
      }
    }
  }

  LabelFn fn() const { return fn_; }

  double operator()(LabelId a, LabelId b) const {
    if (!dense_.empty()) return dense_[a * dict2_->size() + b];
    return label_sim(fn_, (*dict1_)[a], (*dict2_)[b]);
  }

 private:
  LabelFn fn_;
  const std::vector<std::string>* dict1_;
  const std::vector<std::string>* dict2_;
  std::vector<double> dense_;
};

}  // namespace fsim
