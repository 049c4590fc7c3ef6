// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fsim/config.hpp"
#include "fsim/errors.hpp"
#include "fsim/graph.hpp"
#include "fsim/label_similarity.hpp"
#include "fsim/matching.hpp"
#include "fsim/parallel.hpp"
#include "fsim/score_table.hpp"
#include "fsim/variant.hpp"

namespace fsim {

/// Node pairs (x ∈ S1, y ∈ S2) chosen by a variant's mapping operator.
struct NeighborMapping {
  Variant variant = Variant::kS;
  std::vector<std::pair<NodeId, NodeId>> pairs;

  std::size_t size() const { return pairs.size(); }
};

struct ConvergenceReport {
  std::size_t iterations = 0;
  /// Δ^k = max |FSim^k - FSim^{k-1}| for k = 1..iterations.
  std::vector<double> deltas;
  /// The quantity compared against ε (equals `deltas` in absolute mode).
  std::vector<double> criterion;
  bool converged = false;
};

struct FSimResult {
  ScoreTable scores;
  ConvergenceReport report;
};

/// Called with each generation's table, starting at generation 0.
using GenerationObserver =
    std::function<void(std::size_t generation, const ScoreTable& table)>;

/// Normalizing operator Ω: |S1| for s and dp, |S1| + |S2| for b,
/// sqrt(|S1|·|S2|) for bj.
inline double normalizer(Variant variant, std::size_t n1, std::size_t n2) {
  switch (variant) {
    case Variant::kS:
    case Variant::kDp:
      return static_cast<double>(n1);
    case Variant::kB:
      return static_cast<double>(n1 + n2);
    case Variant::kBj:
      return std::sqrt(static_cast<double>(n1) * static_cast<double>(n2));
  }
  return 0.0;
}

/// Set score for empty neighbor sets, where Ω may vanish. Mirrors the exact
/// definitions: an empty S1 is vacuously simulated for s/dp; b/bj need both
/// sides empty. Returns nullopt when both sets are non-empty.
inline std::optional<double> empty_set_score(Variant variant, std::size_t n1,
                                             std::size_t n2) {
  if (n1 > 0 && n2 > 0) return std::nullopt;
  switch (variant) {
    case Variant::kS:
    case Variant::kDp:
      return n1 == 0 ? 1.0 : 0.0;
    case Variant::kB:
    case Variant::kBj:
      return (n1 == 0 && n2 == 0) ? 1.0 : 0.0;
  }
  return 0.0;
}

/// Fractional χ-simulation engine over a fixed graph pair and configuration.
class FSimEngine {
 public:
  FSimEngine(const LabeledDigraph& g1, const LabeledDigraph& g2,
             FSimConfig cfg)
      : g1_(g1), g2_(g2), cfg_(std::move(cfg)), lsim_(cfg_.label_fn, g1, g2) {
    cfg_.validate();
  }

  const FSimConfig& config() const { return cfg_; }
  const LabeledDigraph& g1() const { return g1_; }
  const LabeledDigraph& g2() const { return g2_; }

  double label_similarity(NodeId u, NodeId v) const {
    return lsim_(g1_.label(u), g2_.label(v));
  }
  bool feasible(NodeId x, NodeId y) const {
    return label_similarity(x, y) >= cfg_.theta;
  }

  /// Generation-0 table: pairs with L >= θ (all pairs when θ = 0), further
  /// restricted to upper bound > β when pruning is on; scores start at L.
  ScoreTable initialize() const {
    const auto n1 = g1_.num_nodes();
    const auto n2 = g2_.num_nodes();
    const bool keep_all = cfg_.theta <= 0.0 && !cfg_.ub_enabled;
    if (keep_all && n1 * n2 > cfg_.max_candidates) throw_budget(n1 * n2);

    std::shared_ptr<const CandidateIndex> keys;
    if (keep_all) {
      keys = std::make_shared<CandidateIndex>(CandidateIndex::full(n1, n2));
    } else {
      std::vector<std::vector<NodeId>> rows(n1);
      std::atomic<std::size_t> total{0};
      parallel_round_robin(
          n1, cfg_.workers,
          [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t u = begin; u < end; ++u) {
              auto& row = rows[u];
              for (NodeId v = 0; v < n2; ++v) {
                const auto uu = static_cast<NodeId>(u);
                if (label_similarity(uu, v) < cfg_.theta) continue;
                if (cfg_.ub_enabled && upper_bound(uu, v) <= cfg_.beta) {
                  continue;
                }
                row.push_back(v);
              }
              const auto seen = total.fetch_add(row.size()) + row.size();
              if (seen > cfg_.max_candidates) throw_budget(seen);
            }
          },
          16);
      std::vector<std::size_t> offsets(n1 + 1, 0);
      for (std::size_t u = 0; u < n1; ++u) {
        offsets[u + 1] = offsets[u] + rows[u].size();
      }
      std::vector<NodeId> cols;
      cols.reserve(offsets[n1]);
      for (auto& row : rows) {
        cols.insert(cols.end(), row.begin(), row.end());
        std::vector<NodeId>().swap(row);
      }
      keys = std::make_shared<CandidateIndex>(n1, n2, std::move(offsets),
                                              std::move(cols));
    }

    std::vector<double> scores(keys->size());
    const auto rows = keys->slot_rows();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = label_similarity(rows[i], keys->col(i));
    }
    return ScoreTable(std::move(keys), std::move(scores), 0);
  }

  /// λ+ + λ- + (1 - w+ - w-)·L(u, v) where λ counts the label-feasible
  /// mapping size in place of mapped scores; clamped to [0, 1].
  double upper_bound(NodeId u, NodeId v) const {
    const double bound =
        cfg_.w_plus * feasible_fraction(g1_.out(u), g2_.out(v)) +
        cfg_.w_minus * feasible_fraction(g1_.in(u), g2_.in(v)) +
        cfg_.label_weight() * label_similarity(u, v);
    return std::clamp(bound, 0.0, 1.0);
  }

  /// Stored score, else α·upper_bound when pruning is on, else 0.
  double lookup_score(const ScoreTable& table, NodeId u, NodeId v) const {
    if (auto s = table.find(u, v)) return *s;
    if (cfg_.ub_enabled && cfg_.alpha > 0.0) {
      return cfg_.alpha * upper_bound(u, v);
    }
    return 0.0;
  }

  NeighborMapping map_neighbors(std::span<const NodeId> s1,
                                std::span<const NodeId> s2,
                                const ScoreTable& prev) const {
    Workspace ws;
    map_into(s1, s2, prev, ws);
    return NeighborMapping{cfg_.variant, ws.pairs};
  }

  /// Σ over the mapping of prev scores, divided by Ω.
  double set_score(std::span<const NodeId> s1, std::span<const NodeId> s2,
                   const ScoreTable& prev) const {
    Workspace ws;
    return set_score_impl(s1, s2, prev, ws);
  }

  double update_pair(NodeId u, NodeId v, const ScoreTable& prev) const {
    Workspace ws;
    return update_pair_impl(u, v, prev, ws);
  }

  /// Iterates until the convergence criterion drops below ε or the
  /// iteration cap is reached. Never throws on non-convergence.
  FSimResult run(const GenerationObserver& observer = {}) const {
    return iterate(observer, std::nullopt);
  }

  /// Runs exactly `generations` updates with no convergence test.
  FSimResult run_generations(std::size_t generations,
                             const GenerationObserver& observer = {}) const {
    return iterate(observer, generations);
  }

 private:
  struct Workspace {
    WeightGrid grid;
    std::vector<unsigned> row_key, col_key;
    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::vector<double> pair_scores;
  };

  [[noreturn]] void throw_budget(std::size_t count) const {
    std::ostringstream msg;
    msg << "candidate pairs exceed the budget of " << cfg_.max_candidates
        << " (reached " << count
        << "); raise theta to restrict mapping by label similarity, or enable "
           "upper-bound pruning with a larger beta";
    throw ResourceError(msg.str());
  }

  double feasible_fraction(std::span<const NodeId> s1,
                           std::span<const NodeId> s2) const {
    const auto variant = cfg_.variant;
    if (auto fixed = empty_set_score(variant, s1.size(), s2.size())) {
      return *fixed;
    }
    std::size_t mapped = 0;
    switch (variant) {
      case Variant::kS:
      case Variant::kB:
        for (NodeId x : s1) {
          mapped += std::any_of(s2.begin(), s2.end(),
                                [&](NodeId y) { return feasible(x, y); });
        }
        if (variant == Variant::kB) {
          for (NodeId y : s2) {
            mapped += std::any_of(s1.begin(), s1.end(),
                                  [&](NodeId x) { return feasible(x, y); });
          }
        }
        break;
      case Variant::kDp:
      case Variant::kBj: {
        WeightGrid grid;
        grid.reset(s1.size(), s2.size());
        for (std::size_t i = 0; i < s1.size(); ++i) {
          for (std::size_t j = 0; j < s2.size(); ++j) {
            if (feasible(s1[i], s2[j])) grid.set(i, j, 1.0);
          }
        }
        mapped = max_feasible_matching_size(grid);
        break;
      }
    }
    return static_cast<double>(mapped) /
           normalizer(variant, s1.size(), s2.size());
  }

  void fill_grid(std::span<const NodeId> s1, std::span<const NodeId> s2,
                 const ScoreTable& prev, Workspace& ws) const {
    ws.grid.reset(s1.size(), s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
      for (std::size_t j = 0; j < s2.size(); ++j) {
        if (!feasible(s1[i], s2[j])) continue;
        ws.grid.set(i, j, lookup_score(prev, s1[i], s2[j]));
      }
    }
  }

  // Fills ws.pairs (and ws.pair_scores) with the variant's mapping.
  void map_into(std::span<const NodeId> s1, std::span<const NodeId> s2,
                const ScoreTable& prev, Workspace& ws) const {
    ws.pairs.clear();
    ws.pair_scores.clear();
    if (s1.empty() || s2.empty()) return;
    fill_grid(s1, s2, prev, ws);
    const auto& grid = ws.grid;
    auto emit = [&](std::size_t i, std::size_t j) {
      ws.pairs.emplace_back(s1[i], s2[j]);
      ws.pair_scores.push_back(grid.w(i, j));
    };

    switch (cfg_.variant) {
      case Variant::kS:
      case Variant::kB: {
        // Strict '>' keeps the smallest id among equal scores.
        for (std::size_t i = 0; i < grid.rows; ++i) {
          std::size_t best = grid.cols;
          for (std::size_t j = 0; j < grid.cols; ++j) {
            if (grid.ok(i, j) && (best == grid.cols || grid.w(i, j) > grid.w(i, best))) {
              best = j;
            }
          }
          if (best != grid.cols) emit(i, best);
        }
        if (cfg_.variant == Variant::kB) {
          for (std::size_t j = 0; j < grid.cols; ++j) {
            std::size_t best = grid.rows;
            for (std::size_t i = 0; i < grid.rows; ++i) {
              if (grid.ok(i, j) && (best == grid.rows || grid.w(i, j) > grid.w(best, j))) {
                best = i;
              }
            }
            if (best != grid.rows) emit(best, j);
          }
        }
        break;
      }
      case Variant::kDp:
      case Variant::kBj: {
        std::vector<int> assignment;
        const bool exact = cfg_.matching == MatchingMode::kExactSmall &&
                           grid.rows * grid.cols <= cfg_.exact_cell_limit;
        if (exact) {
          assignment = exact_max_matching(grid);
        } else {
          ws.row_key.assign(s1.begin(), s1.end());
          ws.col_key.assign(s2.begin(), s2.end());
          assignment = greedy_matching(grid, ws.row_key, ws.col_key);
        }
        for (std::size_t i = 0; i < assignment.size(); ++i) {
          if (assignment[i] != kUnmatched) {
            emit(i, static_cast<std::size_t>(assignment[i]));
          }
        }
        break;
      }
    }
  }

  double set_score_impl(std::span<const NodeId> s1, std::span<const NodeId> s2,
                        const ScoreTable& prev, Workspace& ws) const {
    if (auto fixed = empty_set_score(cfg_.variant, s1.size(), s2.size())) {
      return *fixed;
    }
    map_into(s1, s2, prev, ws);
    double sum = 0.0;
    for (double s : ws.pair_scores) sum += s;
    return sum / normalizer(cfg_.variant, s1.size(), s2.size());
  }

  double update_pair_impl(NodeId u, NodeId v, const ScoreTable& prev,
                          Workspace& ws) const {
    double score = cfg_.label_weight() * label_similarity(u, v);
    if (cfg_.w_plus > 0.0) {
      score += cfg_.w_plus * set_score_impl(g1_.out(u), g2_.out(v), prev, ws);
    }
    if (cfg_.w_minus > 0.0) {
      score += cfg_.w_minus * set_score_impl(g1_.in(u), g2_.in(v), prev, ws);
    }
    constexpr double kSlack = 1e-12;
    if (!(score >= -kSlack && score <= 1.0 + kSlack)) {
      std::ostringstream msg;
      msg << "score " << score << " out of [0,1] for pair (" << u << ", " << v
          << ")";
      throw std::logic_error(msg.str());
    }
    return std::clamp(score, 0.0, 1.0);
  }

  FSimResult iterate(const GenerationObserver& observer,
                     std::optional<std::size_t> fixed_generations) const {
    FSimResult result;
    ScoreTable& table = result.scores;
    table = initialize();
    if (observer) observer(0, table);

    const std::size_t n = table.size();
    const auto& keys = table.keys();
    const auto rows = keys.slot_rows();
    const std::size_t workers = std::max<std::size_t>(1, cfg_.workers);
    std::vector<Workspace> spaces(workers);
    std::vector<double> next(n);
    std::vector<double> worker_abs(workers), worker_rel(workers);
    const bool relative = cfg_.convergence == ConvergenceMode::kRelative;
    const std::size_t cap = fixed_generations.value_or(cfg_.iteration_cap());

    for (std::size_t k = 1; k <= cap; ++k) {
      std::fill(worker_abs.begin(), worker_abs.end(), 0.0);
      std::fill(worker_rel.begin(), worker_rel.end(), 0.0);
      const auto& prev = table;
      const auto prev_scores = prev.scores();
      parallel_round_robin(
          n, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
            double max_abs = worker_abs[w];
            double max_rel = worker_rel[w];
            auto& ws = spaces[w];
            for (std::size_t i = begin; i < end; ++i) {
              const double s = update_pair_impl(rows[i], keys.col(i), prev, ws);
              next[i] = s;
              const double d = std::abs(s - prev_scores[i]);
              max_abs = std::max(max_abs, d);
              if (relative) {
                const double base =
                    std::max(std::abs(prev_scores[i]),
                             std::numeric_limits<double>::epsilon());
                max_rel = std::max(max_rel, d / base);
              }
            }
            worker_abs[w] = max_abs;
            worker_rel[w] = max_rel;
          });
      const double delta =
          *std::max_element(worker_abs.begin(), worker_abs.end());
      const double measure =
          relative ? *std::max_element(worker_rel.begin(), worker_rel.end())
                   : delta;
      std::swap(table.mutable_scores(), next);
      table.set_generation(k);
      result.report.iterations = k;
      result.report.deltas.push_back(delta);
      result.report.criterion.push_back(measure);
      if (observer) observer(k, table);
      if (!fixed_generations && measure < cfg_.epsilon) {
        result.report.converged = true;
        break;
      }
    }
    if (fixed_generations) {
      const auto& c = result.report.criterion;
      result.report.converged = !c.empty() && c.back() < cfg_.epsilon;
    }
    return result;
  }

  const LabeledDigraph& g1_;
  const LabeledDigraph& g2_;
  FSimConfig cfg_;
  LabelSimMatrix lsim_;
};

inline ScoreTable initialize_scores(const LabeledDigraph& g1,
                                    const LabeledDigraph& g2,
                                    const FSimConfig& cfg) {
  return FSimEngine(g1, g2, cfg).initialize();
}

inline FSimResult iterate_to_convergence(
    const LabeledDigraph& g1, const LabeledDigraph& g2, const FSimConfig& cfg,
    const GenerationObserver& observer = {}) {
  return FSimEngine(g1, g2, cfg).run(observer);
}

}  // namespace fsim
