/*
 * Copyright (c) 2026, cmmrank authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cmm/errors.hpp"
#include "cmm/rng.hpp"

namespace cmm {

// Item and cluster labels are 1-based contiguous integers stored as bytes;
// names are mapped at ingestion. 0 is reserved for the missing-slot marker.
using label_t = std::uint8_t;
constexpr int kMissingSlot = 0;
constexpr int kMaxItems = 200;

// A strict ordering of n items. order()[i] is the item ranked (i+1)-th.
class Permutation {
 public:
  static Permutation from_order(std::span<const int> order);
  static Permutation identity(int n);
  static Permutation uniform(int n, rng_t& rng);
  // No validation; for trusted internal construction.
  static Permutation unchecked(std::vector<label_t> order);

  int n() const { return int(order_.size()); }
  // Item ranked at 0-based position pos.
  int item_at(int pos) const { return order_[std::size_t(pos)]; }
  const std::vector<label_t>& order() const { return order_; }

  // r with r.order()[item-1] = rank of item, i.e. r(pi(i)) = i.
  Permutation inverse() const;
  // 0-based rank of each item, indexed by item value (entry 0 unused).
  std::vector<int> rank_by_item() const;

  bool operator==(const Permutation&) const = default;

 private:
  explicit Permutation(std::vector<label_t> order) : order_(std::move(order)) {}
  std::vector<label_t> order_;
};

// A ranking with unobserved positions. Stores a full-length slot vector
// with 0 marking missing slots, covering top-k and arbitrary missing
// patterns uniformly.
class PartialRanking {
 public:
  static PartialRanking from_slots(std::span<const int> slots);
  static PartialRanking of(const Permutation& pi);

  int n() const { return int(slots_.size()); }
  bool is_complete() const { return observed_ == n(); }
  int observed_count() const { return observed_; }
  // Item at 0-based position pos, or 0 when missing.
  int slot(int pos) const { return slots_[std::size_t(pos)]; }
  const std::vector<label_t>& slots() const { return slots_; }

  std::vector<int> missing_positions() const;  // 0-based
  std::vector<int> missing_items() const;      // ascending item values
  bool observes(int item) const;

  Permutation to_permutation() const;  // requires is_complete()

  bool operator==(const PartialRanking&) const = default;

 private:
  explicit PartialRanking(std::vector<label_t> slots, int observed)
      : slots_(std::move(slots)), observed_(observed) {}
  std::vector<label_t> slots_;
  int observed_ = 0;
};

// Cluster sizes (n_1, ..., n_L); fixes the model structure.
class ClusteringTable {
 public:
  static ClusteringTable from_sizes(std::span<const int> sizes);

  int n() const { return n_; }
  int num_clusters() const { return int(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }

  // Allocation with sorted labels: items 1..n_1 in cluster 1, and so on.
  class Allocation canonical_allocation() const;
  // 0-based block index of each 0-based rank position.
  std::vector<label_t> block_of_rank() const;

  bool operator==(const ClusteringTable&) const = default;

 private:
  ClusteringTable(std::vector<int> sizes, int n)
      : sizes_(std::move(sizes)), n_(n) {}
  std::vector<int> sizes_;
  int n_ = 0;
};

// Item -> ordered-cluster-label map; the consensus parameter. Labels are
// 1..L with every cluster nonempty.
class Allocation {
 public:
  static Allocation from_labels(std::span<const int> labels);
  static Allocation unchecked(std::vector<label_t> labels, int num_clusters);
  // Random allocation with the table's cluster sizes.
  static Allocation uniform(const ClusteringTable& ct, rng_t& rng);

  int n() const { return int(labels_.size()); }
  int num_clusters() const { return num_clusters_; }
  // Cluster label of item (1-based item value).
  label_t label_of(int item) const { return labels_[std::size_t(item - 1)]; }
  const std::vector<label_t>& labels() const { return labels_; }

  bool operator==(const Allocation& o) const { return labels_ == o.labels_; }

 private:
  Allocation(std::vector<label_t> labels, int num_clusters)
      : labels_(std::move(labels)), num_clusters_(num_clusters) {}
  std::vector<label_t> labels_;
  int num_clusters_ = 0;
};

ClusteringTable clustering_table(const Allocation& z);

// Item sets by increasing cluster label.
std::vector<std::vector<int>> ordered_clusters(const Allocation& z);

// Blocks ({pi(1..n_1)}, {pi(n_1+1..n_1+n_2)}, ...) as item lists.
std::vector<std::vector<int>> split_by_table(const Permutation& pi,
                                             const ClusteringTable& ct);

// Nondecreasing copy of the allocation labels.
std::vector<label_t> sorted_labels(const Allocation& z);

// q rankings over a shared item set. Rows may be partial; item names are
// optional and map labels to display strings.
struct RankingDataset {
  int n = 0;
  std::vector<PartialRanking> rows;
  std::vector<std::string> item_names;

  static RankingDataset of(std::vector<PartialRanking> rows,
                           std::vector<std::string> item_names = {});
  static RankingDataset of_permutations(std::vector<Permutation> perms,
                                        std::vector<std::string> item_names = {});
  // Zero-row dataset; used by the prior-recovery path where no data enters
  // the posterior.
  static RankingDataset empty(int n);

  int q() const { return int(rows.size()); }
  bool all_complete() const;
  Permutation row_permutation(int j) const;
  std::string item_name(int item) const;
};

// Empirical pairwise preference proportions. Pairs never compared hold a
// neutral 0.5 with count 0 so callers can tell them apart from informed
// near-indifference.
struct PreferenceMatrix {
  int n = 0;
  std::vector<double> p;               // row-major n*n
  std::vector<std::int64_t> counts;    // comparisons per ordered pair

  // Share of rows ranking item i before item i' (1-based items).
  double pbar(int i, int ip) const {
    return p[std::size_t(i - 1) * std::size_t(n) + std::size_t(ip - 1)];
  }
  std::int64_t count(int i, int ip) const {
    return counts[std::size_t(i - 1) * std::size_t(n) + std::size_t(ip - 1)];
  }
};

PreferenceMatrix preference_matrix(const RankingDataset& data);

}  // namespace cmm
