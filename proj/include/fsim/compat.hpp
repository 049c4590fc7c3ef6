// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsim/config.hpp"
#include "fsim/engine.hpp"
#include "fsim/errors.hpp"
#include "fsim/exact_simulation.hpp"
#include "fsim/graph.hpp"
#include "fsim/matching.hpp"
#include "fsim/parallel.hpp"
#include "fsim/score_table.hpp"

namespace fsim {

enum class RoleSimNormalizer { kRootOfProduct, kMax };

inline RoleSimNormalizer parse_rolesim_normalizer(std::string_view s) {
  if (s == "rop") return RoleSimNormalizer::kRootOfProduct;
  if (s == "max") return RoleSimNormalizer::kMax;
  throw ConfigError("unknown RoleSim normalizer '" + std::string(s) +
                    "' (expected rop or max)");
}

struct CompatOptions {
  double decay = 0.8;
  double epsilon = 0.01;
  std::size_t max_iterations = 0;  // 0 = ⌈log_decay ε⌉ + 5
  std::size_t workers = 1;
  /// Iterate exactly max_iterations times, ignoring ε.
  bool fixed_iterations = false;

  std::size_t cap() const {
    return max_iterations != 0
               ? max_iterations
               : contraction_iteration_bound(decay, epsilon) + 5;
  }
  void validate() const {
    if (!(decay > 0.0 && decay < 1.0)) {
      throw ConfigError("decay must lie in (0,1)");
    }
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (workers == 0) throw ConfigError("workers must be at least 1");
    if (fixed_iterations && max_iterations == 0) {
      throw ConfigError("fixed_iterations needs max_iterations");
    }
  }
};

namespace detail {

// Double-buffered all-pairs iteration over one graph. `update(u, v, prev)`
// returns the next score for (u, v) reading generation k-1 only.
template <typename Update>
FSimResult iterate_all_pairs(std::size_t n, std::vector<double> initial,
                             const CompatOptions& opt, Update&& update) {
  auto keys = std::make_shared<CandidateIndex>(CandidateIndex::full(n, n));
  FSimResult result;
  result.scores = ScoreTable(keys, std::move(initial), 0);
  auto& table = result.scores;
  std::vector<double> next(n * n);
  const std::size_t workers = opt.workers;
  std::vector<double> worker_delta(workers);
  for (std::size_t k = 1; k <= opt.cap(); ++k) {
    std::fill(worker_delta.begin(), worker_delta.end(), 0.0);
    const auto prev = table.scores();
    parallel_round_robin(
        n * n, workers,
        [&](std::size_t w, std::size_t begin, std::size_t end) {
          double d = worker_delta[w];
          for (std::size_t i = begin; i < end; ++i) {
            const auto u = static_cast<NodeId>(i / n);
            const auto v = static_cast<NodeId>(i % n);
            next[i] = update(u, v, prev);
            d = std::max(d, std::abs(next[i] - prev[i]));
          }
          worker_delta[w] = d;
        });
    const double delta =
        *std::max_element(worker_delta.begin(), worker_delta.end());
    std::swap(table.mutable_scores(), next);
    table.set_generation(k);
    result.report.iterations = k;
    result.report.deltas.push_back(delta);
    result.report.criterion.push_back(delta);
    if (delta < opt.epsilon) {
      result.report.converged = true;
      if (!opt.fixed_iterations) break;
    } else {
      result.report.converged = false;
    }
  }
  return result;
}

}  // namespace detail

/// SimRank through the framework: w+ = 0, w- = decay, M = S1 × S2 over
/// in-neighbors, Ω = |S1|·|S2|, label term 0, diagonal pinned to 1.
inline FSimResult run_simrank(const LabeledDigraph& g,
                              const CompatOptions& opt) {
  opt.validate();
  const auto n = g.num_nodes();
  std::vector<double> initial(n * n, 0.0);
  for (std::size_t u = 0; u < n; ++u) initial[u * n + u] = 1.0;
  return detail::iterate_all_pairs(
      n, std::move(initial), opt,
      [&](NodeId u, NodeId v, std::span<const double> prev) -> double {
        if (u == v) return 1.0;
        if (u > v) std::swap(u, v);  // same summation order for (u,v), (v,u)
        const auto iu = g.in(u);
        const auto iv = g.in(v);
        if (iu.empty() || iv.empty()) return 0.0;
        double sum = 0.0;
        for (NodeId x : iu) {
          for (NodeId y : iv) sum += prev[x * n + y];
        }
        return opt.decay * sum /
               (static_cast<double>(iu.size()) * static_cast<double>(iv.size()));
      });
}

/// Row-major n×n start values min(d(u), d(v)) / max(d(u), d(v)) over
/// undirected degrees; 1 when both degrees are 0.
inline std::vector<double> rolesim_initial_scores(const LabeledDigraph& g) {
  const auto n = g.num_nodes();
  std::vector<std::size_t> degree(n);
  for (NodeId u = 0; u < n; ++u) degree[u] = undirected_neighbors(g, u).size();
  std::vector<double> initial(n * n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      const auto hi = std::max(degree[u], degree[v]);
      initial[u * n + v] =
          hi == 0 ? 1.0
                  : static_cast<double>(std::min(degree[u], degree[v])) /
                        static_cast<double>(hi);
    }
  }
  return initial;
}

/// RoleSim-style role similarity on the undirected view: bijective-style
/// injective neighbor matching, w- = 0, label term fixed at 1, initial score
/// min(d(u), d(v)) / max(d(u), d(v)).
inline FSimResult run_rolesim(const LabeledDigraph& g,
                              RoleSimNormalizer normalizer_choice,
                              const CompatOptions& opt,
                              std::size_t exact_cell_limit = 64) {
  opt.validate();
  const auto n = g.num_nodes();
  std::vector<std::vector<NodeId>> nbrs(n);
  for (NodeId u = 0; u < n; ++u) nbrs[u] = undirected_neighbors(g, u);
  auto initial = rolesim_initial_scores(g);

  struct Scratch {
    WeightGrid grid;
    std::vector<unsigned> rk, ck;
  };
  const double decay = opt.decay;
  return detail::iterate_all_pairs(
      n, std::move(initial), opt,
      [&](NodeId u, NodeId v, std::span<const double> prev) -> double {
        thread_local Scratch local;
        const auto& nu = nbrs[u];
        const auto& nv = nbrs[v];
        double set_score;
        if (nu.empty() || nv.empty()) {
          set_score = (nu.empty() && nv.empty()) ? 1.0 : 0.0;
        } else {
          auto& grid = local.grid;
          grid.reset(nu.size(), nv.size());
          for (std::size_t i = 0; i < nu.size(); ++i) {
            for (std::size_t j = 0; j < nv.size(); ++j) {
              grid.set(i, j, prev[nu[i] * n + nv[j]]);
            }
          }
          std::vector<int> assignment;
          if (grid.rows * grid.cols <= exact_cell_limit) {
            assignment = exact_max_matching(grid);
          } else {
            local.rk.assign(nu.begin(), nu.end());
            local.ck.assign(nv.begin(), nv.end());
            assignment = greedy_matching(grid, local.rk, local.ck);
          }
          double sum = 0.0;
          for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (assignment[i] != kUnmatched) {
              sum += grid.w(i, static_cast<std::size_t>(assignment[i]));
            }
          }
          const double du = static_cast<double>(nu.size());
          const double dv = static_cast<double>(nv.size());
          const double omega = normalizer_choice == RoleSimNormalizer::kMax
                                   ? std::max(du, dv)
                                   : std::sqrt(du * dv);
          set_score = sum / omega;
        }
        return std::clamp(decay * set_score + (1.0 - decay), 0.0, 1.0);
      });
}

/// Pairs (u, v) where "sig_k(u) = sig_k(v)" and "FSim_b^k(u, v) = 1"
/// disagree, with the engine at generation k on G1 = G2, w- = 0, indicator
/// labels, θ = 1 and exact-small matching.
inline std::vector<std::pair<NodeId, NodeId>> kbisim_theorem_violations(
    const LabeledDigraph& g, std::size_t k, double w_plus = 0.8) {
  FSimConfig cfg;
  cfg.variant = Variant::kB;
  cfg.w_plus = w_plus;
  cfg.w_minus = 0.0;
  cfg.label_fn = LabelFn::kIndicator;
  cfg.theta = 1.0;
  cfg.matching = MatchingMode::kExactSmall;
  FSimEngine engine(g, g, cfg);
  const auto scores = engine.run_generations(k).scores;
  const auto sigs = kbisim_signatures(g, k);

  std::vector<std::pair<NodeId, NodeId>> violations;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const auto s = scores.find(u, v);
      const bool full = s && std::abs(*s - 1.0) <= 1e-9;
      const bool bisimilar = sigs.sig[u] == sigs.sig[v];
      if (full != bisimilar) violations.emplace_back(u, v);
    }
  }
  return violations;
}

inline bool verify_kbisim_theorem(const LabeledDigraph& g, std::size_t k) {
  return kbisim_theorem_violations(g, k).empty();
}

}  // namespace fsim
