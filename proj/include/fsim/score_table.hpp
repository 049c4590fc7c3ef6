// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fsim/graph.hpp"

namespace fsim {

/// Fixed, sorted key set of candidate pairs in CSR form: row u lists the
/// v-side nodes paired with u.
class CandidateIndex {
 public:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  CandidateIndex(std::size_t n1, std::size_t n2,
                 std::vector<std::size_t> row_offsets, std::vector<NodeId> cols)
      : n1_(n1),
        n2_(n2),
        row_offsets_(std::move(row_offsets)),
        cols_(std::move(cols)) {}

  /// Every pair of V1 × V2.
  static CandidateIndex full(std::size_t n1, std::size_t n2) {
    std::vector<std::size_t> offsets(n1 + 1);
    std::vector<NodeId> cols(n1 * n2);
    for (std::size_t u = 0; u < n1; ++u) {
      offsets[u + 1] = offsets[u] + n2;
      for (std::size_t v = 0; v < n2; ++v) {
        cols[u * n2 + v] = static_cast<NodeId>(v);
      }
    }
    return CandidateIndex(n1, n2, std::move(offsets), std::move(cols));
  }

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t size() const { return cols_.size(); }

  std::span<const NodeId> row(NodeId u) const {
    return {cols_.data() + row_offsets_[u],
            row_offsets_[u + 1] - row_offsets_[u]};
  }
  std::size_t row_begin(NodeId u) const { return row_offsets_[u]; }

  /// Slot of (u, v), or kAbsent.
  std::size_t find(NodeId u, NodeId v) const {
    const std::size_t begin = row_offsets_[u];
    const std::size_t len = row_offsets_[u + 1] - begin;
    if (len == n2_) return begin + v;
    auto r = row(u);
    auto it = std::lower_bound(r.begin(), r.end(), v);
    if (it == r.end() || *it != v) return kAbsent;
    return begin + static_cast<std::size_t>(it - r.begin());
  }

  /// (u, v) of a slot, by binary search over row offsets.
  std::pair<NodeId, NodeId> key(std::size_t slot) const {
    auto it = std::upper_bound(row_offsets_.begin(), row_offsets_.end(), slot);
    const auto u = static_cast<NodeId>(it - row_offsets_.begin() - 1);
    return {u, cols_[slot]};
  }

  /// Row of every slot, for fast iteration.
  std::vector<NodeId> slot_rows() const {
    std::vector<NodeId> rows(size());
    for (NodeId u = 0; u < n1_; ++u) {
      std::fill(rows.begin() + static_cast<std::ptrdiff_t>(row_offsets_[u]),
                rows.begin() + static_cast<std::ptrdiff_t>(row_offsets_[u + 1]),
                u);
    }
    return rows;
  }
  NodeId col(std::size_t slot) const { return cols_[slot]; }

 private:
  std::size_t n1_;
  std::size_t n2_;
  std::vector<std::size_t> row_offsets_;
  std::vector<NodeId> cols_;
};

/// Sparse (u, v) -> score map for one generation. Pairs outside the key set
/// are absent, which is distinct from a stored zero.
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(std::shared_ptr<const CandidateIndex> keys,
             std::vector<double> scores, std::size_t generation)
      : keys_(std::move(keys)),
        scores_(std::move(scores)),
        generation_(generation) {}

  const CandidateIndex& keys() const { return *keys_; }
  const std::shared_ptr<const CandidateIndex>& shared_keys() const {
    return keys_;
  }
  std::size_t size() const { return scores_.size(); }
  std::size_t generation() const { return generation_; }
  void set_generation(std::size_t g) { generation_ = g; }

  std::optional<double> find(NodeId u, NodeId v) const {
    if (!keys_ || u >= keys_->n1() || v >= keys_->n2()) return std::nullopt;
    const auto slot = keys_->find(u, v);
    if (slot == CandidateIndex::kAbsent) return std::nullopt;
    return scores_[slot];
  }
  bool contains(NodeId u, NodeId v) const { return find(u, v).has_value(); }

  std::span<const double> scores() const { return scores_; }
  std::vector<double>& mutable_scores() { return scores_; }

  /// Calls fn(u, v, score) over stored pairs in (u, v) order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (!keys_) return;
    for (NodeId u = 0; u < keys_->n1(); ++u) {
      auto r = keys_->row(u);
      const auto begin = keys_->row_begin(u);
      for (std::size_t i = 0; i < r.size(); ++i) fn(u, r[i], scores_[begin + i]);
    }
  }

 private:
  std::shared_ptr<const CandidateIndex> keys_;
  std::vector<double> scores_;
  std::size_t generation_ = 0;
};

}  // namespace fsim
