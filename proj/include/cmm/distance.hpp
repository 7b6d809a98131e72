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
#include <vector>

#include "cmm/types.hpp"

namespace cmm {

enum class DistanceKind { hamming_oc, kendall_oc };

const char* to_string(DistanceKind kind);

// Rank-wise label disagreements between the permutation split by the
// allocation's table and the sorted consensus labels.
int oc_distance_hamming(const Permutation& pi, const Allocation& z);

// Pairwise-disagreement count over the block/cluster contingency table;
// ties in the consensus do not contribute.
int oc_distance_kendall(const Permutation& pi, const Allocation& z);

int oc_distance(const Permutation& pi, const Allocation& z, DistanceKind kind);

// Sum of per-row distances; the model's sufficient statistic. Rows must be
// complete (augmentation handles partial rows elsewhere). Accumulated in
// 64 bits; theta values fitted under different kinds are not comparable.
long long sum_distance(const RankingDataset& data, const Allocation& z,
                       DistanceKind kind);

// Precomputed per-allocation state for repeated distance evaluations on
// byte buffers. Holds mutable scratch: copy per worker instead of sharing.
class DistanceContext {
 public:
  DistanceContext(const Allocation& z, DistanceKind kind);

  int n() const { return n_; }
  int num_clusters() const { return num_clusters_; }
  DistanceKind kind() const { return kind_; }

  // items: items-by-rank bytes, zero-padded per the kernel contract.
  int distance_bytes(const std::uint8_t* items) const;
  int distance(const Permutation& pi) const;

  const std::uint8_t* label_lut() const { return lut_.data(); }
  const std::uint8_t* expected_labels() const { return ztilde_.data(); }

 private:
  DistanceKind kind_;
  int n_ = 0;
  int num_clusters_ = 0;
  std::vector<std::uint8_t> lut_;        // cluster label by item value, [0]=0
  std::vector<std::uint8_t> ztilde_;     // sorted labels by rank, padded
  std::vector<label_t> block_of_rank_;   // 0-based block per rank
  mutable std::vector<int> table_;       // num_clusters^2 scratch
  mutable std::vector<int> below_;       // prefix scratch
  mutable std::vector<std::uint8_t> buf_;
};

// Distance sums over a dataset with cheap deltas for two-item label swaps,
// the proposal used by the annealing and posterior samplers. The clustering
// table is fixed; the allocation argument varies. Rows can be replaced to
// track data augmentation.
class DatasetDistance {
 public:
  DatasetDistance(const RankingDataset& data, const ClusteringTable& ct,
                  DistanceKind kind);

  int n() const { return n_; }
  int q() const { return q_; }
  DistanceKind kind() const { return kind_; }
  const ClusteringTable& table() const { return ct_; }

  long long total(const Allocation& z) const { return total(z.labels()); }
  // Change of total(z) if items a and b exchanged cluster labels.
  long long swap_delta(const Allocation& z, int item_a, int item_b) const {
    return swap_delta(z.labels(), item_a, item_b);
  }
  // Distance of a single stored row under z.
  int row_distance(int j, const Allocation& z) const {
    return row_distance(j, z.labels());
  }

  // span variants keyed by raw label vectors; the samplers' hot paths.
  long long total(std::span<const label_t> labels) const;
  long long swap_delta(std::span<const label_t> labels, int item_a,
                       int item_b) const;
  int row_distance(int j, std::span<const label_t> labels) const;

  void set_row(int j, const Permutation& pi);
  Permutation row(int j) const;

 private:
  void index_row(int j);

  DistanceKind kind_;
  int n_ = 0;
  int q_ = 0;
  ClusteringTable ct_;
  std::vector<label_t> ztilde_;             // consensus labels by rank
  std::vector<label_t> block_of_rank_;      // 0-based
  std::size_t stride_ = 0;
  std::vector<std::uint8_t> items_rows_;    // q x stride, items by rank
  std::vector<label_t> block_by_item_;      // q x (n+1)
  std::vector<std::int32_t> rank_label_cnt_;  // (n+1) x (L+1), see total()
  mutable std::vector<int> table_;
  mutable std::vector<int> below_;
};

}  // namespace cmm
