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

#include "cmm/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "cmm/kernels.hpp"
#include "cmm/parallel.hpp"

namespace cmm {

namespace {

// Bilinear form over the contingency table; mirrors distance.cpp but works
// on the chain's in-place table.
int kendall_value(const std::vector<int>& table, int L,
                  std::vector<int>& below) {
  below.assign(std::size_t(L), 0);
  int d = 0;
  for (int i = L - 1; i >= 0; --i) {
    const int* row = table.data() + std::size_t(i) * std::size_t(L);
    for (int j = 0; j < L; ++j)
      if (row[j] != 0) d += row[j] * below[std::size_t(j)];
    int prefix = 0;
    for (int j = 0; j < L; ++j) {
      prefix += row[j];
      below[std::size_t(j)] += prefix;
    }
  }
  return d;
}

}  // namespace

long long default_chain_len(int n) {
  if (n < 2) return 1;
  return 5 * (long long)std::ceil(double(n) * std::log(double(n)));
}

CmmChain::CmmChain(const CmmParams& params, const Permutation& init)
    : ctx_(params.z, params.kind), theta_(params.theta) {
  if (init.n() != params.z.n())
    fail(errc::dimension_mismatch, "initial state size differs from model");
  items_.assign(kern::padded_size(std::size_t(ctx_.n())), 0);
  std::copy(init.order().begin(), init.order().end(), items_.begin());
  init_state();
}

CmmChain::CmmChain(const CmmParams& params, rng_t& rng)
    : ctx_(params.z, params.kind), theta_(params.theta) {
  const int n = ctx_.n();
  items_.assign(kern::padded_size(std::size_t(n)), 0);
  for (int i = 0; i < n; ++i) items_[std::size_t(i)] = std::uint8_t(i + 1);
  std::shuffle(items_.begin(), items_.begin() + n, rng);
  init_state();
}

void CmmChain::init_state() {
  const int n = ctx_.n();
  const int L = ctx_.num_clusters();
  block_of_rank_.assign(std::size_t(n), 0);
  // expected_labels() is the sorted consensus; block boundaries are its
  // label changes.
  const std::uint8_t* zt = ctx_.expected_labels();
  int blk = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && zt[i] != zt[i - 1]) ++blk;
    block_of_rank_[std::size_t(i)] = label_t(blk);
  }
  table_.assign(std::size_t(L) * std::size_t(L), 0);
  const std::uint8_t* lut = ctx_.label_lut();
  for (int i = 0; i < n; ++i) {
    const int b = block_of_rank_[std::size_t(i)];
    const int c = lut[items_[std::size_t(i)]] - 1;
    ++table_[std::size_t(b) * std::size_t(L) + std::size_t(c)];
  }
  below_.assign(std::size_t(L), 0);
  distance_ = ctx_.distance_bytes(items_.data());
}

void CmmChain::step(rng_t& rng) {
  const int n = ctx_.n();
  if (n < 2) return;
  const int j = uniform_int(rng, 0, n - 1);
  int k = uniform_int(rng, 0, n - 2);
  if (k >= j) ++k;
  const std::uint8_t a = items_[std::size_t(j)];
  const std::uint8_t b = items_[std::size_t(k)];
  const std::uint8_t* lut = ctx_.label_lut();
  const int la = lut[a];
  const int lb = lut[b];
  int delta = 0;
  const int L = ctx_.num_clusters();
  const int bj = block_of_rank_[std::size_t(j)];
  const int bk = block_of_rank_[std::size_t(k)];
  bool table_touched = false;
  if (la != lb && bj != bk) {
    if (ctx_.kind() == DistanceKind::hamming_oc) {
      const std::uint8_t* zt = ctx_.expected_labels();
      delta = int(lb != zt[j]) + int(la != zt[k]) - int(la != zt[j]) -
              int(lb != zt[k]);
    } else {
      table_touched = true;
      auto cell = [&](int blk, int lab) -> int& {
        return table_[std::size_t(blk) * std::size_t(L) + std::size_t(lab - 1)];
      };
      --cell(bj, la);
      ++cell(bj, lb);
      --cell(bk, lb);
      ++cell(bk, la);
      delta = kendall_value(table_, L, below_) - distance_;
    }
  }
  bool accept = delta <= 0;
  if (!accept) accept = uniform01(rng) < std::exp(-theta_ * double(delta));
  if (accept) {
    items_[std::size_t(j)] = b;
    items_[std::size_t(k)] = a;
    distance_ += delta;
  } else if (table_touched) {
    auto cell = [&](int blk, int lab) -> int& {
      return table_[std::size_t(blk) * std::size_t(L) + std::size_t(lab - 1)];
    };
    ++cell(bj, la);
    --cell(bj, lb);
    ++cell(bk, lb);
    --cell(bk, la);
  }
}

void CmmChain::run(long long steps, rng_t& rng) {
  for (long long s = 0; s < steps; ++s) step(rng);
}

Permutation CmmChain::state() const {
  return Permutation::unchecked(
      std::vector<label_t>(items_.begin(), items_.begin() + ctx_.n()));
}

Permutation metropolis_step(const Permutation& pi, const CmmParams& params,
                            rng_t& rng) {
  CmmChain chain(params, pi);
  chain.step(rng);
  return chain.state();
}

RankingDataset sample_rankings(const CmmParams& params,
                               const SamplerConfig& config) {
  const int n = params.z.n();
  const long long len =
      config.chain_len > 0 ? config.chain_len : default_chain_len(n);
  if (config.n_chains <= 0) return RankingDataset::empty(n);
  std::vector<PartialRanking> rows;
  rows.reserve(std::size_t(config.n_chains));
  std::vector<std::vector<label_t>> states(std::size_t(config.n_chains));
  parallel_for(std::size_t(config.n_chains), config.threads,
               [&](std::size_t c) {
                 rng_t rng = make_rng(config.seed, c);
                 CmmChain chain(params, rng);
                 chain.run(len, rng);
                 const auto cur = chain.state_order();
                 states[c].assign(cur.begin(), cur.end());
               });
  for (auto& s : states)
    rows.push_back(PartialRanking::of(Permutation::unchecked(std::move(s))));
  return RankingDataset::of(std::move(rows));
}

long long sample_distance_sum(const CmmParams& params, long long chain_len,
                              int n_chains, std::uint64_t seed, int threads) {
  if (n_chains <= 0) return 0;
  const long long len =
      chain_len > 0 ? chain_len : default_chain_len(params.z.n());
  std::vector<long long> per_chain(std::size_t(n_chains), 0);
  parallel_for(std::size_t(n_chains), threads, [&](std::size_t c) {
    rng_t rng = make_rng(seed, c);
    CmmChain chain(params, rng);
    chain.run(len, rng);
    per_chain[c] = chain.distance();
  });
  long long total = 0;
  for (long long d : per_chain) total += d;
  return total;
}

}  // namespace cmm
