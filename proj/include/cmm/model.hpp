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
#include "cmm/types.hpp"

namespace cmm {

// Model parameters: consensus allocation, concentration and distance
// choice. theta >= 0; theta = 0 is the uniform boundary case.
struct CmmParams {
  Allocation z;
  double theta = 1.0;
  DistanceKind kind = DistanceKind::kendall_oc;
};

// Exhaustive enumeration stays desk-scale up to 9! permutations; larger n
// must go through the importance-sampling estimator.
constexpr int kEnumerationCap = 9;

// Visits every permutation of {1..n} as a zero-padded byte buffer.
void for_each_permutation(int n,
                          const std::function<void(const std::uint8_t*)>& fn);

// log of the exact normalizer: sum over all n! permutations of
// exp(-theta * d_oc(pi, z)), accumulated through per-distance counts in
// log-sum-exp form.
double exact_log_psi(double theta, const Allocation& z, DistanceKind kind,
                     int cap = kEnumerationCap);

// Exact counts of permutations by distance value; index = distance.
std::vector<std::uint64_t> distance_histogram(const Allocation& z,
                                              DistanceKind kind,
                                              int cap = kEnumerationCap);

// -theta * d_oc(pi, z) - log_psi, with the normalizer supplied by the
// caller (exact or estimated).
double log_prob(const Permutation& pi, const CmmParams& params,
                double log_psi);

// Probability that the item in each rank belongs to each cluster.
struct RcMatrix {
  int n = 0;
  int num_clusters = 0;
  std::vector<double> p;  // row-major n x L

  // 0-based rank position and cluster index.
  double at(int rank_pos, int cluster) const {
    return p[std::size_t(rank_pos) * std::size_t(num_clusters) +
             std::size_t(cluster)];
  }
};

RcMatrix rank_cluster_exact(const CmmParams& params,
                            int cap = kEnumerationCap);

// Monte Carlo estimate from sampler draws: n_samples independent chains of
// chain_len steps each.
RcMatrix rank_cluster_mc(const CmmParams& params, int n_samples,
                         long long chain_len, std::uint64_t seed,
                         int threads = 1);

}  // namespace cmm
