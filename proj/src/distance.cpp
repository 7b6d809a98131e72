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

#include "cmm/distance.hpp"

#include <algorithm>
#include <cstring>

#include "cmm/kernels.hpp"

namespace cmm {

namespace {

void check_dims(const Permutation& pi, const Allocation& z) {
  if (pi.n() != z.n())
    fail(errc::dimension_mismatch, "permutation and allocation sizes differ");
}

// Bilinear double sum over the block x cluster contingency table: pairs
// where the earlier-block member's cluster label is >= the later one's.
int kendall_from_table(const int* table, int num_clusters,
                       std::vector<int>& below) {
  below.assign(std::size_t(num_clusters), 0);
  int d = 0;
  for (int i = num_clusters - 1; i >= 0; --i) {
    const int* row = table + std::size_t(i) * std::size_t(num_clusters);
    for (int j = 0; j < num_clusters; ++j)
      if (row[j] != 0) d += row[j] * below[std::size_t(j)];
    int prefix = 0;
    for (int j = 0; j < num_clusters; ++j) {
      prefix += row[j];
      below[std::size_t(j)] += prefix;
    }
  }
  return d;
}

// Contribution of an unordered item pair given blocks and labels.
inline int pair_term(int block_u, int label_u, int block_v, int label_v) {
  if (block_u < block_v) return label_v <= label_u;
  if (block_v < block_u) return label_u <= label_v;
  return 0;
}

}  // namespace

const char* to_string(DistanceKind kind) {
  return kind == DistanceKind::hamming_oc ? "hamming" : "kendall";
}

int oc_distance_hamming(const Permutation& pi, const Allocation& z) {
  check_dims(pi, z);
  const std::vector<label_t> zt = sorted_labels(z);
  int d = 0;
  for (int i = 0; i < pi.n(); ++i)
    d += (z.label_of(pi.item_at(i)) != zt[std::size_t(i)]);
  return d;
}

int oc_distance_kendall(const Permutation& pi, const Allocation& z) {
  check_dims(pi, z);
  const ClusteringTable ct = clustering_table(z);
  const int L = ct.num_clusters();
  const std::vector<label_t> block = ct.block_of_rank();
  std::vector<int> table(std::size_t(L) * std::size_t(L), 0);
  for (int i = 0; i < pi.n(); ++i) {
    const int b = block[std::size_t(i)];
    const int c = z.label_of(pi.item_at(i)) - 1;
    ++table[std::size_t(b) * std::size_t(L) + std::size_t(c)];
  }
  std::vector<int> below;
  return kendall_from_table(table.data(), L, below);
}

int oc_distance(const Permutation& pi, const Allocation& z,
                DistanceKind kind) {
  return kind == DistanceKind::hamming_oc ? oc_distance_hamming(pi, z)
                                          : oc_distance_kendall(pi, z);
}

long long sum_distance(const RankingDataset& data, const Allocation& z,
                       DistanceKind kind) {
  if (!data.all_complete())
    fail(errc::partial_data_not_allowed,
         "sum_distance requires complete rankings");
  long long total = 0;
  for (int j = 0; j < data.q(); ++j)
    total += oc_distance(data.row_permutation(j), z, kind);
  return total;
}

DistanceContext::DistanceContext(const Allocation& z, DistanceKind kind)
    : kind_(kind), n_(z.n()), num_clusters_(z.num_clusters()) {
  lut_ = kern::padded_bytes(std::size_t(n_));
  for (int item = 1; item <= n_; ++item)
    lut_[std::size_t(item)] = z.label_of(item);
  const std::vector<label_t> zt = sorted_labels(z);
  ztilde_.assign(kern::padded_size(std::size_t(n_)), 0);
  std::copy(zt.begin(), zt.end(), ztilde_.begin());
  block_of_rank_ = clustering_table(z).block_of_rank();
  table_.assign(std::size_t(num_clusters_) * std::size_t(num_clusters_), 0);
  below_.assign(std::size_t(num_clusters_), 0);
  buf_.assign(kern::padded_size(std::size_t(n_)), 0);
}

int DistanceContext::distance_bytes(const std::uint8_t* items) const {
  if (kind_ == DistanceKind::hamming_oc)
    return int(kern::active().lut_mismatch(items, lut_.data(), ztilde_.data(),
                                           std::size_t(n_)));
  std::fill(table_.begin(), table_.end(), 0);
  for (int i = 0; i < n_; ++i) {
    const int b = block_of_rank_[std::size_t(i)];
    const int c = lut_[items[i]] - 1;
    ++table_[std::size_t(b) * std::size_t(num_clusters_) + std::size_t(c)];
  }
  return kendall_from_table(table_.data(), num_clusters_, below_);
}

int DistanceContext::distance(const Permutation& pi) const {
  if (pi.n() != n_)
    fail(errc::dimension_mismatch, "permutation size differs from context");
  std::copy(pi.order().begin(), pi.order().end(), buf_.begin());
  return distance_bytes(buf_.data());
}

DatasetDistance::DatasetDistance(const RankingDataset& data,
                                 const ClusteringTable& ct, DistanceKind kind)
    : kind_(kind), n_(data.n), q_(data.q()), ct_(ct) {
  if (ct.n() != n_)
    fail(errc::size_mismatch, "table sizes do not sum to the item count");
  if (!data.all_complete())
    fail(errc::partial_data_not_allowed,
         "distance sums require complete rankings");
  ztilde_ = ct.canonical_allocation().labels();
  block_of_rank_ = ct.block_of_rank();
  stride_ = kern::padded_size(std::size_t(n_));
  items_rows_.assign(std::size_t(q_) * stride_, 0);
  block_by_item_.assign(std::size_t(q_) * std::size_t(n_ + 1), 0);
  rank_label_cnt_.assign(
      std::size_t(n_ + 1) * std::size_t(ct.num_clusters() + 1), 0);
  for (int j = 0; j < q_; ++j) {
    const auto& order = data.rows[std::size_t(j)].slots();
    std::copy(order.begin(), order.end(),
              items_rows_.begin() + std::size_t(j) * stride_);
    index_row(j);
  }
  table_.assign(std::size_t(ct.num_clusters()) * std::size_t(ct.num_clusters()),
                0);
  below_.assign(std::size_t(ct.num_clusters()), 0);
}

// Rebuilds the per-row indexes and the rank-label counts contributed by
// row j from its current bytes. rank_label_cnt_[item][l] counts rows where
// the consensus label expected at the item's rank equals l; Hamming totals
// reduce to q*n minus matched counts.
void DatasetDistance::index_row(int j) {
  const std::uint8_t* items = items_rows_.data() + std::size_t(j) * stride_;
  label_t* blocks = block_by_item_.data() + std::size_t(j) * std::size_t(n_ + 1);
  const int L = ct_.num_clusters();
  for (int i = 0; i < n_; ++i) {
    const int item = items[i];
    blocks[item] = block_of_rank_[std::size_t(i)];
    ++rank_label_cnt_[std::size_t(item) * std::size_t(L + 1) +
                      std::size_t(ztilde_[std::size_t(i)])];
  }
}

long long DatasetDistance::total(std::span<const label_t> labels) const {
  const int L = ct_.num_clusters();
  if (kind_ == DistanceKind::hamming_oc) {
    long long matched = 0;
    for (int item = 1; item <= n_; ++item)
      matched += rank_label_cnt_[std::size_t(item) * std::size_t(L + 1) +
                                 std::size_t(labels[std::size_t(item - 1)])];
    return (long long)(q_) * n_ - matched;
  }
  long long total = 0;
  for (int j = 0; j < q_; ++j) {
    const std::uint8_t* items = items_rows_.data() + std::size_t(j) * stride_;
    std::fill(table_.begin(), table_.end(), 0);
    for (int i = 0; i < n_; ++i) {
      const int b = block_of_rank_[std::size_t(i)];
      const int c = labels[std::size_t(items[i]) - 1] - 1;
      ++table_[std::size_t(b) * std::size_t(L) + std::size_t(c)];
    }
    total += kendall_from_table(table_.data(), L, below_);
  }
  return total;
}

long long DatasetDistance::swap_delta(std::span<const label_t> labels,
                                      int item_a, int item_b) const {
  const int la = labels[std::size_t(item_a - 1)];
  const int lb = labels[std::size_t(item_b - 1)];
  if (la == lb) return 0;
  const int L = ct_.num_clusters();
  if (kind_ == DistanceKind::hamming_oc) {
    const auto cnt = [&](int item, int l) {
      return (long long)rank_label_cnt_[std::size_t(item) * std::size_t(L + 1) +
                                        std::size_t(l)];
    };
    return (cnt(item_a, la) + cnt(item_b, lb)) -
           (cnt(item_a, lb) + cnt(item_b, la));
  }
  long long delta = 0;
  for (int j = 0; j < q_; ++j) {
    const label_t* blocks =
        block_by_item_.data() + std::size_t(j) * std::size_t(n_ + 1);
    const int ba = blocks[item_a];
    const int bb = blocks[item_b];
    int row_delta = pair_term(ba, lb, bb, la) - pair_term(ba, la, bb, lb);
    for (int x = 1; x <= n_; ++x) {
      if (x == item_a || x == item_b) continue;
      const int bx = blocks[x];
      const int lx = labels[std::size_t(x - 1)];
      row_delta += pair_term(ba, lb, bx, lx) - pair_term(ba, la, bx, lx);
      row_delta += pair_term(bb, la, bx, lx) - pair_term(bb, lb, bx, lx);
    }
    delta += row_delta;
  }
  return delta;
}

int DatasetDistance::row_distance(int j, std::span<const label_t> labels) const {
  const std::uint8_t* items = items_rows_.data() + std::size_t(j) * stride_;
  const int L = ct_.num_clusters();
  if (kind_ == DistanceKind::hamming_oc) {
    int d = 0;
    for (int i = 0; i < n_; ++i)
      d += (labels[std::size_t(items[i]) - 1] != ztilde_[std::size_t(i)]);
    return d;
  }
  std::fill(table_.begin(), table_.end(), 0);
  for (int i = 0; i < n_; ++i) {
    const int b = block_of_rank_[std::size_t(i)];
    const int c = labels[std::size_t(items[i]) - 1] - 1;
    ++table_[std::size_t(b) * std::size_t(L) + std::size_t(c)];
  }
  return kendall_from_table(table_.data(), L, below_);
}

void DatasetDistance::set_row(int j, const Permutation& pi) {
  if (pi.n() != n_)
    fail(errc::dimension_mismatch, "permutation size differs from dataset");
  std::uint8_t* items = items_rows_.data() + std::size_t(j) * stride_;
  const int L = ct_.num_clusters();
  // retract the old row's rank-label counts
  for (int i = 0; i < n_; ++i) {
    const int item = items[i];
    --rank_label_cnt_[std::size_t(item) * std::size_t(L + 1) +
                      std::size_t(ztilde_[std::size_t(i)])];
  }
  std::copy(pi.order().begin(), pi.order().end(), items);
  index_row(j);
}

Permutation DatasetDistance::row(int j) const {
  const std::uint8_t* items = items_rows_.data() + std::size_t(j) * stride_;
  return Permutation::unchecked(
      std::vector<label_t>(items, items + std::size_t(n_)));
}

}  // namespace cmm
