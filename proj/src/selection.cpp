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

#include "cmm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "cmm/math_util.hpp"
#include "cmm/parallel.hpp"
#include "cmm/pseudo.hpp"

namespace cmm {

double log_ct_prior(const ClusteringTable& ct) {
  return -log_multinomial_coef(ct.n(), ct.sizes());
}

Criterion info_criterion(const RankingDataset& data, const Allocation& z,
                         double theta, DistanceKind kind, long long num_draws,
                         std::uint64_t seed, int threads) {
  const long long dist_sum = sum_distance(data, z, kind);
  const IsEstimate psi =
      estimate_log_psi(theta, z, kind, num_draws, seed, threads);
  Criterion c;
  c.value = -theta * double(dist_sum) - double(data.q()) * psi.log_psi +
            log_ct_prior(z);
  c.se = double(data.q()) * psi.se_log;
  return c;
}

double data_criterion(const RankingDataset& data, const Allocation& z) {
  if (z.num_clusters() < 2)
    fail(errc::single_cluster,
         "data criterion undefined without between-cluster pairs");
  if (!data.all_complete())
    fail(errc::partial_data_not_allowed,
         "data criterion requires complete rankings");
  const int n = data.n;
  long long concordant = 0;
  std::vector<int> rank(std::size_t(n) + 1, 0);
  for (int j = 0; j < data.q(); ++j) {
    const auto& slots = data.rows[std::size_t(j)].slots();
    for (int pos = 0; pos < n; ++pos) rank[slots[std::size_t(pos)]] = pos;
    for (int a = 1; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) {
        const int la = z.label_of(a), lb = z.label_of(b);
        if (la == lb) continue;
        const int lower = la < lb ? a : b;
        const int higher = la < lb ? b : a;
        concordant += rank[std::size_t(lower)] < rank[std::size_t(higher)];
      }
  }
  long long pairs = (long long)(n) * (n - 1) / 2;
  const ClusteringTable ct = clustering_table(z);
  for (int s : ct.sizes()) pairs -= (long long)(s) * (s - 1) / 2;
  return double(concordant) / (double(data.q()) * double(pairs));
}

double default_merge_tol(int q) { return std::sqrt(0.5 / double(q)); }

InitialStructure initial_structure(const PreferenceMatrix& pref, double tol) {
  if (tol <= 0.0 || tol >= 0.5)
    fail(errc::bad_config, "merge tolerance must lie in (0, 0.5)");
  const int n = pref.n;
  std::vector<std::vector<int>> groups;
  for (int i = 1; i <= n; ++i) groups.push_back({i});

  // pooled preference share between two groups: all cross item pairs,
  // weighted by their comparison counts
  auto group_pbar = [&](const std::vector<int>& a, const std::vector<int>& b,
                        double& pbar) -> bool {
    double wins = 0;
    double cnt = 0;
    for (int i : a)
      for (int j : b) {
        const double c = double(pref.count(i, j));
        wins += pref.pbar(i, j) * c;
        cnt += c;
      }
    if (cnt <= 0) return false;
    pbar = wins / cnt;
    return true;
  };

  for (;;) {
    double best_gap = tol;
    int best_a = -1, best_b = -1;
    for (std::size_t a = 0; a < groups.size(); ++a)
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        double pbar = 0.5;
        if (!group_pbar(groups[a], groups[b], pbar)) continue;
        const double gap = std::fabs(pbar - 0.5);
        if (gap < best_gap) {
          best_gap = gap;
          best_a = int(a);
          best_b = int(b);
        }
      }
    if (best_a < 0) break;
    auto merged = groups[std::size_t(best_a)];
    merged.insert(merged.end(), groups[std::size_t(best_b)].begin(),
                  groups[std::size_t(best_b)].end());
    groups.erase(groups.begin() + best_b);
    groups[std::size_t(best_a)] = std::move(merged);
  }

  // order groups by mean rank; for complete data the mean observed rank of
  // item i is exactly 1 + sum over others of the share ranking them first
  std::vector<double> item_rank(std::size_t(n) + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    double r = 1.0;
    for (int j = 1; j <= n; ++j)
      if (j != i) r += 1.0 - pref.pbar(i, j);
    item_rank[std::size_t(i)] = r;
  }
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double s = 0;
    for (int i : groups[g]) s += item_rank[std::size_t(i)];
    order.emplace_back(s / double(groups[g].size()), g);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& x, const auto& y) {
                     if (x.first != y.first) return x.first < y.first;
                     return x.second < y.second;
                   });

  std::vector<int> sizes;
  std::vector<int> labels(std::size_t(n), 0);
  int label = 1;
  for (const auto& [score, g] : order) {
    sizes.push_back(int(groups[g].size()));
    for (int i : groups[g]) labels[std::size_t(i - 1)] = label;
    ++label;
  }
  InitialStructure init{ClusteringTable::from_sizes(sizes),
                        Allocation::from_labels(labels)};
  return init;
}

std::vector<ClusteringTable> neighbor_tables(const ClusteringTable& ct) {
  const auto& sizes = ct.sizes();
  const int L = ct.num_clusters();
  std::vector<ClusteringTable> out;
  std::set<std::vector<int>> seen;
  seen.insert(sizes);
  auto emit = [&](std::vector<int> s) {
    s.erase(std::remove(s.begin(), s.end(), 0), s.end());
    if (s.empty() || seen.count(s)) return;
    seen.insert(s);
    out.push_back(ClusteringTable::from_sizes(s));
  };
  for (int l = 0; l < L; ++l) {
    for (int dir : {-1, +1}) {
      const int target = l + dir;
      if (target < 0) continue;  // no new leading cluster
      std::vector<int> s = sizes;
      --s[std::size_t(l)];
      if (target == L)
        s.push_back(1);  // trailing singleton
      else
        ++s[std::size_t(target)];
      emit(std::move(s));
    }
  }
  return out;
}

namespace {

std::uint64_t hash_sizes(const std::vector<int>& sizes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (int s : sizes) {
    h ^= std::uint64_t(s);
    h *= 1099511628211ULL;
  }
  return h;
}

constexpr double kDegenerateTheta = 50.0;

CtCandidate evaluate_table(const RankingDataset& data,
                           const ClusteringTable& ct, DistanceKind kind,
                           const SearchConfig& config, int step) {
  MleConfig mle = config.mle;
  mle.seed = splitmix64(config.seed ^ hash_sizes(ct.sizes()));
  mle.threads = 1;  // parallelism lives at the neighbor level
  CtCandidate cand{ct, ct.canonical_allocation(), 0.0, 0.0, 0.0, step};
  try {
    const MleFit fit = fit_mle(data, ct, kind, mle);
    cand.z = fit.z;
    cand.theta = fit.theta;
  } catch (const error& e) {
    if (e.code() != errc::zero_mean_distance) throw;
    // perfectly concordant fit: theta is unbounded, score at a large cap;
    // the anneal rerun reproduces fit_mle's allocation seed-for-seed
    rng_t rng = make_rng(mle.seed, 0x5a);
    cand.z = anneal_allocation(data, ct, kind, mle.anneal, rng);
    cand.theta = kDegenerateTheta;
  }
  if (config.criterion == CriterionKind::info) {
    const Criterion c =
        info_criterion(data, cand.z, cand.theta, kind, config.num_draws,
                       splitmix64(mle.seed ^ 0x15), 1);
    cand.value = c.value;
    cand.se = c.se;
  } else {
    cand.value = ct.num_clusters() < 2
                     ? -std::numeric_limits<double>::infinity()
                     : data_criterion(data, cand.z);
    cand.se = 0.0;
  }
  return cand;
}

}  // namespace

SearchResult greedy_search(const RankingDataset& data,
                           const ClusteringTable& initial, DistanceKind kind,
                           const SearchConfig& config) {
  SearchResult result;
  std::map<std::vector<int>, std::size_t> cache;

  auto evaluated = [&](const ClusteringTable& ct) {
    return cache.find(ct.sizes()) != cache.end();
  };

  auto record = [&](CtCandidate cand) -> std::size_t {
    cache[cand.ct.sizes()] = result.visited.size();
    result.visited.push_back(std::move(cand));
    return result.visited.size() - 1;
  };

  std::size_t current =
      record(evaluate_table(data, initial, kind, config, 0));

  rng_t sub_rng = make_rng(config.seed, 0x5e1);
  for (int step = 1; step <= config.max_steps; ++step) {
    std::vector<ClusteringTable> neigh =
        neighbor_tables(result.visited[current].ct);
    if (config.filter) {
      std::erase_if(neigh, [&](const ClusteringTable& t) {
        return !config.filter(t);
      });
    }
    if (config.max_neighbors > 0 &&
        int(neigh.size()) > config.max_neighbors) {
      std::shuffle(neigh.begin(), neigh.end(), sub_rng);
      neigh.erase(neigh.begin() + config.max_neighbors, neigh.end());
    }
    std::vector<ClusteringTable> todo;
    for (const auto& t : neigh)
      if (!evaluated(t)) todo.push_back(t);

    std::vector<CtCandidate> fresh(todo.size(),
                                   CtCandidate{initial,
                                               initial.canonical_allocation(),
                                               0, 0, 0, step});
    parallel_for(todo.size(), config.threads, [&](std::size_t i) {
      fresh[i] = evaluate_table(data, todo[i], kind, config, step);
    });
    for (auto& cand : fresh) record(std::move(cand));

    // move to the best neighbor if it strictly improves
    std::size_t best_idx = current;
    for (const auto& t : neigh) {
      const std::size_t idx = cache.at(t.sizes());
      if (result.visited[idx].value > result.visited[best_idx].value)
        best_idx = idx;
    }
    result.steps = step;
    if (best_idx == current ||
        result.visited[best_idx].value <= result.visited[current].value)
      break;
    current = best_idx;
  }

  result.best_index = current;

  if (config.criterion == CriterionKind::info && result.visited.size() > 1) {
    double runner = -std::numeric_limits<double>::infinity();
    double runner_se = 0.0;
    for (std::size_t i = 0; i < result.visited.size(); ++i) {
      if (i == current) continue;
      if (result.visited[i].value > runner) {
        runner = result.visited[i].value;
        runner_se = result.visited[i].se;
      }
    }
    const double gap = result.best().value - runner;
    const double combined = std::sqrt(result.best().se * result.best().se +
                                      runner_se * runner_se);
    result.ambiguous = gap < config.ambiguity_k * combined;
  }
  return result;
}

}  // namespace cmm
