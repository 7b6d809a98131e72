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
#include <functional>
#include <vector>

#include "cmm/distance.hpp"
#include "cmm/rng.hpp"
#include "cmm/types.hpp"

// Posterior sampling for (z, theta) with the clustering table fixed. The
// intractable normalizer never enters: the z move conditions on theta, the
// theta move cancels it through auxiliary draws, and partial rows are
// completed by data augmentation.

namespace cmm {

struct GammaPrior {
  double shape = 2.0;
  double rate = 2.0;
  double log_pdf(double x) const;
};

struct Priors {
  GammaPrior theta{};
  // Optional log mass for z; empty means uniform over allocations with the
  // given table, under which the ratio drops out of the acceptance.
  std::function<double(const Allocation&)> log_z_mass;
};

struct PosteriorConfig {
  int iterations = 11000;
  int burn_in = 1000;
  int m_switch = 2;
  int z_moves_per_iter = 1;
  long long aux_chain_len = 200;  // sampler steps per auxiliary draw
  double theta0 = 1.0;
  double init_step = 0.5;        // log-scale proposal sd, adapted in burn-in
  double target_accept = 0.44;
  std::uint64_t seed = 0;
  int threads = 1;
  // Test hook, called once per recorded iteration.
  std::function<void(int iter, const DatasetDistance& aug,
                     const Allocation& z, double theta)>
      inspect;
};

struct PosteriorTrace {
  int n = 0;
  int burn_in = 0;
  std::vector<double> theta;
  std::vector<std::vector<label_t>> z;
  std::vector<double> log_target;  // unnormalized, up to the normalizer
  std::vector<long long> distance_sum;
  std::vector<std::uint8_t> z_accepted;
  std::vector<std::uint8_t> theta_accepted;
  std::vector<int> augment_accepts;

  int iterations() const { return int(theta.size()); }
  std::vector<double> theta_post() const;  // post-burn-in samples
  double theta_mean() const;
  double theta_quantile(double p) const;
  double theta_map() const;  // Freedman-Diaconis histogram mode
  // Most-visited post-burn-in allocation; ties broken by the higher mean
  // log target.
  Allocation map_allocation() const;
  double z_accept_rate() const;
  double theta_accept_rate() const;
};

// One Metropolis switch move on z given complete (or augmented) data.
// Mutates labels in place on acceptance and returns the new distance sum.
struct ZUpdate {
  bool accepted = false;
  long long distance_sum = 0;
};
ZUpdate z_update(std::vector<label_t>& labels, int num_clusters,
                 long long current_sum, const DatasetDistance& dist,
                 double theta, const Priors& priors, int m_switch,
                 rng_t& rng);

// Approximate exchange move for theta: propose on the log scale, draw
// auxiliary data at the proposal, and accept on the tractable ratio.
struct ThetaUpdate {
  double theta = 0.0;
  bool accepted = false;
};
ThetaUpdate theta_exchange_update(double theta, const Allocation& z,
                                  DistanceKind kind, long long data_sum,
                                  int q, long long aux_chain_len,
                                  const GammaPrior& prior, double log_step,
                                  std::uint64_t aux_seed, int threads,
                                  rng_t& rng);

// Data-augmentation move for one partial row: shuffle the unranked items
// into the missing slots and accept on the distance change. Rows with a
// single missing slot have one completion and are always accepted;
// complete rows are a no-op.
bool augment_row(DatasetDistance& dist, int row_index,
                 const PartialRanking& observed,
                 std::span<const label_t> z_labels, double theta, rng_t& rng);

// Metropolis-within-Gibbs sweep: augment partial rows, update z, update
// theta; one record per iteration. Accepts an empty dataset, in which case
// the chain targets the prior.
PosteriorTrace run_posterior(const RankingDataset& data,
                             const ClusteringTable& ct, DistanceKind kind,
                             const Priors& priors,
                             const PosteriorConfig& config);

}  // namespace cmm
