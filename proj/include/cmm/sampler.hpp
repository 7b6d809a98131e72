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

#include "cmm/model.hpp"
#include "cmm/rng.hpp"
#include "cmm/types.hpp"

namespace cmm {

// Chains mix in about n*log(n) transposition steps; the default keeps a
// 5x margin over that guideline.
long long default_chain_len(int n);

struct SamplerConfig {
  long long chain_len = 0;  // 0 = default_chain_len(n)
  int n_chains = 1;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Random-transposition Metropolis chain targeting the model distribution.
// The normalizer cancels in the acceptance ratio. Distances are maintained
// incrementally; for the Kendall kind the block/cluster contingency table
// is updated in place.
class CmmChain {
 public:
  CmmChain(const CmmParams& params, const Permutation& init);
  CmmChain(const CmmParams& params, rng_t& rng);  // uniform start

  void step(rng_t& rng);
  void run(long long steps, rng_t& rng);

  int n() const { return ctx_.n(); }
  int distance() const { return distance_; }
  // items by rank for the current state (no padding)
  std::span<const std::uint8_t> state_order() const {
    return {items_.data(), std::size_t(ctx_.n())};
  }
  Permutation state() const;

 private:
  void init_state();

  DistanceContext ctx_;
  double theta_;
  std::vector<std::uint8_t> items_;     // padded items-by-rank
  std::vector<label_t> block_of_rank_;
  std::vector<int> table_;              // kendall contingency, L x L
  std::vector<int> below_;
  int distance_ = 0;
};

// One Metropolis transition from pi; exposed for unit checks.
Permutation metropolis_step(const Permutation& pi, const CmmParams& params,
                            rng_t& rng);

// q permutations, each the terminal state of an independent chain started
// from an independent uniform permutation.
RankingDataset sample_rankings(const CmmParams& params,
                               const SamplerConfig& config);

// Sum of d_oc over the terminal states of n_chains independent chains; the
// fast path used by the exchange update and the moment-matching fit, which
// only consume the distance statistic.
long long sample_distance_sum(const CmmParams& params, long long chain_len,
                              int n_chains, std::uint64_t seed, int threads);

}  // namespace cmm
