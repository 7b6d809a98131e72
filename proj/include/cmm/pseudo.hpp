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

#include "cmm/model.hpp"
#include "cmm/rng.hpp"
#include "cmm/types.hpp"

namespace cmm {

// Per-cluster counts of still-unranked items during the forward-ranking
// walk. Stage i of the multistage approximation conditions on this state.
struct StageState {
  std::vector<int> remaining;  // index l-1 holds the count for cluster l

  static StageState initial(const Allocation& z);
  int total() const;
  // Smallest cluster label with unranked items; the reference against
  // which stage penalties are zero.
  int smallest_nonempty() const;  // errors: empty_stage
  void remove_one(int cluster);
};

// Penalty exponent for placing a cluster-l item next: zero for the
// smallest nonempty label, otherwise the remaining count of cluster l.
int stage_penalty(int cluster, const StageState& stage);

// Stage cluster probabilities: exp(-theta * penalty) normalized over the
// nonempty clusters. Exhausted clusters get probability zero; including
// them would allow the item stage to divide by zero.
std::vector<double> stage_cluster_probs(const StageState& stage, double theta);

// log of the multistage approximation: product over the first n-1 ranks of
// the cluster-stage probability and the uniform within-cluster item pick.
double pseudo_log_prob(const Permutation& pi, const CmmParams& params);

// Draw from the multistage approximation; if log_prob_out is non-null it
// receives the draw's own log pseudo-probability.
Permutation pseudo_sample(const CmmParams& params, rng_t& rng,
                          double* log_prob_out = nullptr);

struct IsEstimate {
  double log_psi = 0.0;
  double se_log = 0.0;    // delta-method standard error of log_psi
  long long samples = 0;
};

// Importance-sampling estimate of the log normalizer using the multistage
// approximation as proposal. Draws run in fixed-size blocks with per-block
// seeds, so results do not depend on the thread count.
IsEstimate estimate_log_psi(double theta, const Allocation& z,
                            DistanceKind kind, long long num_draws,
                            std::uint64_t seed, int threads = 1);

}  // namespace cmm
