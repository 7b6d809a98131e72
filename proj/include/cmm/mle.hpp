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

#include "cmm/distance.hpp"
#include "cmm/rng.hpp"
#include "cmm/types.hpp"

namespace cmm {

// Strictly increasing powers applied to the target; the zero-temperature
// tail accepts only improvements.
struct AnnealingSchedule {
  std::vector<double> powers;

  static AnnealingSchedule geometric(double beta0, double beta, int len);
  // beta0 = 0.05, beta = 1.1, 150 temperatures; small start, fast ramp.
  static AnnealingSchedule standard();
};

struct AnnealConfig {
  AnnealingSchedule schedule = AnnealingSchedule::standard();
  int moves_per_temp = 0;   // 0: 20 * n proposals at each temperature
  int m_switch = 2;         // elements switched per proposal
  int plateau_temps = 20;   // stop after this many all-reject temperatures
  bool polish = true;       // pairwise descent to a 2-switch local minimum
};

// Minimizes the distance sum over allocations with the table fixed; switch
// proposals permute labels across items, never the cluster sizes.
Allocation anneal_allocation(const DatasetDistance& dist,
                             const AnnealConfig& config, rng_t& rng);
Allocation anneal_allocation(const RankingDataset& data,
                             const ClusteringTable& ct, DistanceKind kind,
                             const AnnealConfig& config, rng_t& rng);

struct ThetaFitConfig {
  double epsilon = 0.01;    // stop when |theta_next - theta| < epsilon;
                            // also sets the per-iteration draw count
  long long chain_len = 0;  // sampler steps per draw; 0 = default
  double theta0 = 1.0;
  int max_iterations = 500;
  int threads = 1;
};

struct ThetaFit {
  double theta = 0.0;
  int iterations = 0;
  double data_mean_distance = 0.0;
  double mc_mean_distance = 0.0;
};

// Moment-matching iteration for the concentration: simulate at the current
// theta, compare the simulated mean distance with the data mean, and scale
// theta by their ratio (damped to [0.5, 2] per step) until the update falls
// below epsilon. Throws zero_mean_distance when the data fit is perfect and
// non_convergence when the iteration cap is hit.
ThetaFit fit_theta(const RankingDataset& data, const Allocation& z,
                   DistanceKind kind, const ThetaFitConfig& config,
                   std::uint64_t seed);

struct MleConfig {
  AnnealConfig anneal{};
  ThetaFitConfig theta{};
  std::uint64_t seed = 0;
  int threads = 1;
};

struct MleFit {
  Allocation z;
  double theta = 0.0;
  long long distance_sum = 0;
  ThetaFit theta_fit{};
};

// Annealing for the allocation followed by the theta fit. A single-cluster
// table is the uniform model: the canonical allocation is returned with
// theta = 0 and no fitting.
MleFit fit_mle(const RankingDataset& data, const ClusteringTable& ct,
               DistanceKind kind, const MleConfig& config);

// Refits on row-resampled replicates; the spread of the returned fits is a
// bootstrap uncertainty summary.
std::vector<MleFit> bootstrap_refit(const RankingDataset& data,
                                    const ClusteringTable& ct,
                                    DistanceKind kind, const MleConfig& config,
                                    int replicates);

}  // namespace cmm
