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

#include "cmm/mle.hpp"
#include "cmm/types.hpp"

namespace cmm {

// log of the uniform allocation mass within a table: minus the log count
// of distinct arrangements. Acts as the complexity penalty, running from 0
// for a single cluster to -log(n!) for all singletons.
double log_ct_prior(const ClusteringTable& ct);
inline double log_ct_prior(const Allocation& z) {
  return log_ct_prior(clustering_table(z));
}

struct Criterion {
  double value = 0.0;
  double se = 0.0;
};

// Penalized log-likelihood at the fitted parameters with the normalizer
// estimated by importance sampling; the standard error propagates the
// normalizer's estimation noise.
Criterion info_criterion(const RankingDataset& data, const Allocation& z,
                         double theta, DistanceKind kind, long long num_draws,
                         std::uint64_t seed, int threads = 1);

// Share of between-cluster item pairs the data ranks concordantly with the
// allocation; in (0,1), larger is better. Needs at least two clusters.
double data_criterion(const RankingDataset& data, const Allocation& z);

// Canonical merge tolerance sqrt(0.5/q): one standard deviation of an
// empirical proportion near one half.
double default_merge_tol(int q);

struct InitialStructure {
  ClusteringTable ct;
  Allocation z;
};

// Builds a starting structure by iteratively merging the group pair whose
// pooled preference share sits closest to one half within the tolerance,
// then ordering groups by mean rank. Pairs that were never compared do not
// trigger merges.
InitialStructure initial_structure(const PreferenceMatrix& pref, double tol);

// All distinct tables reachable by moving one observation between adjacent
// clusters; emptied clusters are removed and a trailing singleton may be
// appended. Every entry stays positive and the total is preserved.
std::vector<ClusteringTable> neighbor_tables(const ClusteringTable& ct);

enum class CriterionKind { info, data };

struct CtCandidate {
  ClusteringTable ct;
  Allocation z;
  double theta = 0.0;
  double value = 0.0;
  double se = 0.0;
  int step_found = 0;
};

struct SearchConfig {
  CriterionKind criterion = CriterionKind::info;
  long long num_draws = 100000;  // importance draws behind each criterion
  MleConfig mle{};
  int max_steps = 50;
  // Optional constraint on the explored tables (fix L, pin edge
  // singletons, ...). Empty accepts everything.
  std::function<bool(const ClusteringTable&)> filter;
  int max_neighbors = 0;  // 0 = evaluate every neighbor
  double ambiguity_k = 3.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SearchResult {
  std::vector<CtCandidate> visited;  // in evaluation order
  std::size_t best_index = 0;
  int steps = 0;
  // Set when the winner's margin over the runner-up is within
  // ambiguity_k combined standard errors (info criterion only).
  bool ambiguous = false;

  const CtCandidate& best() const { return visited[best_index]; }
};

// Greedy ascent over neighboring tables: every unvisited neighbor is
// fitted and scored, the best strictly-improving one becomes current, and
// visited tables are cached so no structure is optimized twice.
SearchResult greedy_search(const RankingDataset& data,
                           const ClusteringTable& initial, DistanceKind kind,
                           const SearchConfig& config);

}  // namespace cmm
