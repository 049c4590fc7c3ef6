// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "fsim/errors.hpp"
#include "fsim/label_similarity.hpp"
#include "fsim/variant.hpp"

namespace fsim {

enum class ConvergenceMode { kAbsolute, kRelative };
enum class MatchingMode { kGreedy, kExactSmall };

inline std::string_view to_string(ConvergenceMode m) {
  return m == ConvergenceMode::kAbsolute ? "abs" : "rel";
}
inline std::string_view to_string(MatchingMode m) {
  return m == MatchingMode::kGreedy ? "greedy" : "exact-small";
}

inline ConvergenceMode parse_convergence_mode(std::string_view s) {
  if (s == "abs" || s == "absolute") return ConvergenceMode::kAbsolute;
  if (s == "rel" || s == "relative") return ConvergenceMode::kRelative;
  throw ConfigError("unknown convergence mode '" + std::string(s) + "'");
}
inline MatchingMode parse_matching_mode(std::string_view s) {
  if (s == "greedy") return MatchingMode::kGreedy;
  if (s == "exact-small") return MatchingMode::kExactSmall;
  throw ConfigError("unknown matching mode '" + std::string(s) + "'");
}

/// Smallest k with decay^k <= epsilon, i.e. ⌈log_decay ε⌉ (at least 1).
inline std::size_t contraction_iteration_bound(double decay, double epsilon) {
  if (epsilon >= 1.0) return 1;
  const double k = std::ceil(std::log(epsilon) / std::log(decay));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

struct FSimConfig {
  Variant variant = Variant::kBj;
  double w_plus = 0.4;
  double w_minus = 0.4;
  /// Mapped neighbor pairs and stored candidates need L(x, y) >= theta.
  double theta = 0.0;
  double epsilon = 0.01;
  ConvergenceMode convergence = ConvergenceMode::kAbsolute;
  /// Unset means ⌈log_{w+ + w-} ε⌉ + 5.
  std::optional<std::size_t> max_iterations;
  LabelFn label_fn = LabelFn::kJaroWinkler;

  bool ub_enabled = false;
  double alpha = 0.0;
  double beta = 0.5;

  MatchingMode matching = MatchingMode::kExactSmall;
  /// exact-small solves dp/bj mappings exactly up to |S1|·|S2| cells.
  std::size_t exact_cell_limit = 64;

  std::size_t workers = 1;
  /// Upper limit on stored candidate pairs.
  std::size_t max_candidates = 200'000'000;

  double label_weight() const { return 1.0 - w_plus - w_minus; }

  std::size_t iteration_cap() const {
    if (max_iterations) return *max_iterations;
    return contraction_iteration_bound(w_plus + w_minus, epsilon) + 5;
  }

  void validate() const {
    if (!(w_plus >= 0.0 && w_plus < 1.0)) {
      throw ConfigError("w+ must lie in [0,1)");
    }
    if (!(w_minus >= 0.0 && w_minus < 1.0)) {
      throw ConfigError("w- must lie in [0,1)");
    }
    const double sum = w_plus + w_minus;
    if (!(sum > 0.0 && sum < 1.0)) {
      std::ostringstream msg;
      msg << "w+ + w- must lie in (0,1), got " << sum;
      throw ConfigError(msg.str());
    }
    if (!(theta >= 0.0 && theta <= 1.0)) {
      throw ConfigError("theta must lie in [0,1]");
    }
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(alpha >= 0.0 && alpha < 1.0)) {
      throw ConfigError("alpha must lie in [0,1)");
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw ConfigError("beta must lie in [0,1]");
    }
    if (workers == 0) throw ConfigError("workers must be at least 1");
    if (max_iterations && *max_iterations == 0) {
      throw ConfigError("max_iterations must be at least 1");
    }
  }
};

}  // namespace fsim
