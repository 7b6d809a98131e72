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

#include "cmm/types.hpp"

#include <algorithm>
#include <numeric>

namespace cmm {

namespace {

void check_item_count(std::size_t n) {
  if (n == 0) fail(errc::empty_input, "empty label sequence");
  if (n > std::size_t(kMaxItems))
    fail(errc::out_of_range_label,
         "item count exceeds supported maximum of " + std::to_string(kMaxItems));
}

}  // namespace

Permutation Permutation::from_order(std::span<const int> order) {
  check_item_count(order.size());
  const int n = int(order.size());
  std::vector<bool> seen(std::size_t(n) + 1, false);
  std::vector<label_t> out(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int v = order[i];
    if (v < 1 || v > n)
      fail(errc::out_of_range_label,
           "label " + std::to_string(v) + " outside 1.." + std::to_string(n));
    if (seen[std::size_t(v)])
      fail(errc::duplicate_label, "label " + std::to_string(v) + " repeated");
    seen[std::size_t(v)] = true;
    out[i] = label_t(v);
  }
  return Permutation(std::move(out));
}

Permutation Permutation::identity(int n) {
  check_item_count(std::size_t(n));
  std::vector<label_t> out(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), label_t(1));
  return Permutation(std::move(out));
}

Permutation Permutation::uniform(int n, rng_t& rng) {
  std::vector<label_t> out(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), label_t(1));
  std::shuffle(out.begin(), out.end(), rng);
  return Permutation(std::move(out));
}

Permutation Permutation::unchecked(std::vector<label_t> order) {
  return Permutation(std::move(order));
}

Permutation Permutation::inverse() const {
  std::vector<label_t> inv(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i)
    inv[std::size_t(order_[i]) - 1] = label_t(i + 1);
  return Permutation(std::move(inv));
}

std::vector<int> Permutation::rank_by_item() const {
  std::vector<int> r(order_.size() + 1, -1);
  for (std::size_t i = 0; i < order_.size(); ++i) r[order_[i]] = int(i);
  return r;
}

PartialRanking PartialRanking::from_slots(std::span<const int> slots) {
  check_item_count(slots.size());
  const int n = int(slots.size());
  std::vector<bool> seen(std::size_t(n) + 1, false);
  std::vector<label_t> out(slots.size());
  int observed = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const int v = slots[i];
    if (v == kMissingSlot) {
      out[i] = 0;
      continue;
    }
    if (v < 1 || v > n)
      fail(errc::out_of_range_label,
           "label " + std::to_string(v) + " outside 1.." + std::to_string(n));
    if (seen[std::size_t(v)])
      fail(errc::duplicate_label, "label " + std::to_string(v) + " repeated");
    seen[std::size_t(v)] = true;
    out[i] = label_t(v);
    ++observed;
  }
  if (observed == 0) fail(errc::fully_missing_row, "no slot observed");
  return PartialRanking(std::move(out), observed);
}

PartialRanking PartialRanking::of(const Permutation& pi) {
  return PartialRanking(pi.order(), pi.n());
}

std::vector<int> PartialRanking::missing_positions() const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i)
    if (slots_[std::size_t(i)] == 0) out.push_back(i);
  return out;
}

std::vector<int> PartialRanking::missing_items() const {
  std::vector<bool> present(std::size_t(n()) + 1, false);
  for (label_t s : slots_)
    if (s != 0) present[s] = true;
  std::vector<int> out;
  for (int v = 1; v <= n(); ++v)
    if (!present[std::size_t(v)]) out.push_back(v);
  return out;
}

bool PartialRanking::observes(int item) const {
  for (label_t s : slots_)
    if (int(s) == item) return true;
  return false;
}

Permutation PartialRanking::to_permutation() const {
  if (!is_complete())
    fail(errc::partial_data_not_allowed, "ranking has missing slots");
  return Permutation::unchecked(slots_);
}

ClusteringTable ClusteringTable::from_sizes(std::span<const int> sizes) {
  if (sizes.empty()) fail(errc::empty_input, "empty clustering table");
  int n = 0;
  for (int s : sizes) {
    if (s < 1) fail(errc::out_of_range_label, "cluster size below 1");
    n += s;
  }
  check_item_count(std::size_t(n));
  return ClusteringTable(std::vector<int>(sizes.begin(), sizes.end()), n);
}

Allocation ClusteringTable::canonical_allocation() const {
  std::vector<label_t> labels;
  labels.reserve(std::size_t(n_));
  for (std::size_t l = 0; l < sizes_.size(); ++l)
    labels.insert(labels.end(), std::size_t(sizes_[l]), label_t(l + 1));
  return Allocation::unchecked(std::move(labels), num_clusters());
}

std::vector<label_t> ClusteringTable::block_of_rank() const {
  std::vector<label_t> out;
  out.reserve(std::size_t(n_));
  for (std::size_t l = 0; l < sizes_.size(); ++l)
    out.insert(out.end(), std::size_t(sizes_[l]), label_t(l));
  return out;
}

Allocation Allocation::from_labels(std::span<const int> labels) {
  check_item_count(labels.size());
  int max_label = 0;
  for (int v : labels) {
    if (v < 1)
      fail(errc::out_of_range_label, "cluster label below 1");
    max_label = std::max(max_label, v);
  }
  if (max_label > int(labels.size()))
    fail(errc::out_of_range_label, "cluster label exceeds item count");
  std::vector<int> used(std::size_t(max_label), 0);
  std::vector<label_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = label_t(labels[i]);
    ++used[std::size_t(labels[i]) - 1];
  }
  for (int l = 0; l < max_label; ++l)
    if (used[std::size_t(l)] == 0)
      fail(errc::out_of_range_label,
           "cluster " + std::to_string(l + 1) + " is empty");
  return Allocation(std::move(out), max_label);
}

Allocation Allocation::unchecked(std::vector<label_t> labels,
                                 int num_clusters) {
  return Allocation(std::move(labels), num_clusters);
}

Allocation Allocation::uniform(const ClusteringTable& ct, rng_t& rng) {
  Allocation z = ct.canonical_allocation();
  std::vector<label_t> labels = z.labels();
  std::shuffle(labels.begin(), labels.end(), rng);
  return Allocation(std::move(labels), ct.num_clusters());
}

ClusteringTable clustering_table(const Allocation& z) {
  std::vector<int> sizes(std::size_t(z.num_clusters()), 0);
  for (label_t l : z.labels()) ++sizes[std::size_t(l) - 1];
  return ClusteringTable::from_sizes(sizes);
}

std::vector<std::vector<int>> ordered_clusters(const Allocation& z) {
  std::vector<std::vector<int>> out(std::size_t(z.num_clusters()));
  for (int item = 1; item <= z.n(); ++item)
    out[std::size_t(z.label_of(item)) - 1].push_back(item);
  return out;
}

std::vector<std::vector<int>> split_by_table(const Permutation& pi,
                                             const ClusteringTable& ct) {
  if (ct.n() != pi.n())
    fail(errc::size_mismatch, "table sizes do not sum to the item count");
  std::vector<std::vector<int>> out;
  out.reserve(std::size_t(ct.num_clusters()));
  int pos = 0;
  for (int s : ct.sizes()) {
    std::vector<int> block;
    block.reserve(std::size_t(s));
    for (int k = 0; k < s; ++k) block.push_back(pi.item_at(pos++));
    out.push_back(std::move(block));
  }
  return out;
}

std::vector<label_t> sorted_labels(const Allocation& z) {
  std::vector<label_t> out = z.labels();
  std::sort(out.begin(), out.end());
  return out;
}

RankingDataset RankingDataset::of(std::vector<PartialRanking> rows,
                                  std::vector<std::string> item_names) {
  if (rows.empty()) fail(errc::empty_input, "dataset has no rows");
  const int n = rows.front().n();
  for (const auto& r : rows)
    if (r.n() != n)
      fail(errc::inconsistent_width, "rows differ in item count");
  if (!item_names.empty() && int(item_names.size()) != n)
    fail(errc::inconsistent_width, "item name count differs from item count");
  RankingDataset d;
  d.n = n;
  d.rows = std::move(rows);
  d.item_names = std::move(item_names);
  return d;
}

RankingDataset RankingDataset::of_permutations(
    std::vector<Permutation> perms, std::vector<std::string> item_names) {
  std::vector<PartialRanking> rows;
  rows.reserve(perms.size());
  for (const auto& p : perms) rows.push_back(PartialRanking::of(p));
  return of(std::move(rows), std::move(item_names));
}

RankingDataset RankingDataset::empty(int n) {
  RankingDataset d;
  d.n = n;
  return d;
}

bool RankingDataset::all_complete() const {
  for (const auto& r : rows)
    if (!r.is_complete()) return false;
  return true;
}

Permutation RankingDataset::row_permutation(int j) const {
  return rows[std::size_t(j)].to_permutation();
}

std::string RankingDataset::item_name(int item) const {
  if (!item_names.empty()) return item_names[std::size_t(item - 1)];
  return "item" + std::to_string(item);
}

PreferenceMatrix preference_matrix(const RankingDataset& data) {
  if (data.q() < 1) fail(errc::empty_input, "dataset has no rows");
  const int n = data.n;
  PreferenceMatrix m;
  m.n = n;
  m.p.assign(std::size_t(n) * std::size_t(n), 0.5);
  m.counts.assign(std::size_t(n) * std::size_t(n), 0);
  std::vector<std::int64_t> wins(std::size_t(n) * std::size_t(n), 0);
  std::vector<int> rank(std::size_t(n) + 1);
  for (const auto& row : data.rows) {
    std::fill(rank.begin(), rank.end(), -1);
    for (int pos = 0; pos < n; ++pos) {
      const int item = row.slot(pos);
      if (item != kMissingSlot) rank[std::size_t(item)] = pos;
    }
    for (int i = 1; i <= n; ++i) {
      if (rank[std::size_t(i)] < 0) continue;
      for (int j = 1; j <= n; ++j) {
        if (j == i || rank[std::size_t(j)] < 0) continue;
        const std::size_t idx =
            std::size_t(i - 1) * std::size_t(n) + std::size_t(j - 1);
        ++m.counts[idx];
        if (rank[std::size_t(i)] < rank[std::size_t(j)]) ++wins[idx];
      }
    }
  }
  for (std::size_t idx = 0; idx < m.p.size(); ++idx)
    if (m.counts[idx] > 0)
      m.p[idx] = double(wins[idx]) / double(m.counts[idx]);
  return m;
}

}  // namespace cmm
