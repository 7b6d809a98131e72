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

#include "cmm/mle.hpp"

#include <algorithm>
#include <cmath>

#include "cmm/sampler.hpp"

namespace cmm {

AnnealingSchedule AnnealingSchedule::geometric(double beta0, double beta,
                                               int len) {
  if (beta0 <= 0.0 || beta <= 1.0 || len < 1)
    fail(errc::bad_config, "geometric schedule needs beta0 > 0, beta > 1");
  AnnealingSchedule s;
  s.powers.resize(std::size_t(len));
  double a = beta0;
  for (int t = 0; t < len; ++t) {
    s.powers[std::size_t(t)] = a;
    a *= beta;
  }
  return s;
}

AnnealingSchedule AnnealingSchedule::standard() {
  return geometric(0.05, 1.1, 150);
}

namespace {

// Swap the labels of two random items; null when they share a cluster.
// Positions are uniform over all pairs, so the proposal is symmetric.
struct SwapProposal {
  int item_a = 0, item_b = 0;
};

SwapProposal propose_swap(int n, rng_t& rng) {
  SwapProposal p;
  p.item_a = uniform_int(rng, 1, n);
  p.item_b = uniform_int(rng, 1, n - 1);
  if (p.item_b >= p.item_a) ++p.item_b;
  return p;
}

void apply_swap(std::vector<label_t>& labels, int a, int b) {
  std::swap(labels[std::size_t(a) - 1], labels[std::size_t(b) - 1]);
}

// Greedy first-improvement descent over all label-swap pairs; terminates
// at a 2-switch local minimum of the distance sum.
void polish_allocation(const DatasetDistance& dist, std::vector<label_t>& labels,
                       long long& current) {
  const int n = int(labels.size());
  bool improved = true;
  while (improved) {
    improved = false;
    for (int a = 1; a <= n && !improved; ++a) {
      for (int b = a + 1; b <= n; ++b) {
        if (labels[std::size_t(a) - 1] == labels[std::size_t(b) - 1]) continue;
        const long long delta = dist.swap_delta(labels, a, b);
        if (delta < 0) {
          apply_swap(labels, a, b);
          current += delta;
          improved = true;
          break;
        }
      }
    }
  }
}

}  // namespace

Allocation anneal_allocation(const DatasetDistance& dist,
                             const AnnealConfig& config, rng_t& rng) {
  const int n = dist.n();
  const int L = dist.table().num_clusters();
  Allocation z = Allocation::uniform(dist.table(), rng);
  if (L == 1 || n < 2) return z;

  std::vector<label_t> labels = z.labels();
  long long current = dist.total(z);
  std::vector<label_t> best = labels;
  long long best_total = current;

  const int moves = config.moves_per_temp > 0 ? config.moves_per_temp : 20 * n;
  const int m = std::max(2, config.m_switch);
  int quiet_temps = 0;

  for (double power : config.schedule.powers) {
    bool state_changed = false;
    for (int mv = 0; mv < moves; ++mv) {
      if (m == 2) {
        const SwapProposal p = propose_swap(n, rng);
        if (labels[std::size_t(p.item_a) - 1] ==
            labels[std::size_t(p.item_b) - 1])
          continue;  // null switch; accepted, no state change
        const long long delta = dist.swap_delta(labels, p.item_a, p.item_b);
        const bool accept =
            delta <= 0 ||
            uniform01(rng) < std::exp(-power * double(delta));
        if (accept) {
          apply_swap(labels, p.item_a, p.item_b);
          current += delta;
          state_changed = true;
        }
      } else {
        // general m-switch: permute the labels of m random items
        std::vector<int> items(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) items[std::size_t(i)] = i + 1;
        std::shuffle(items.begin(), items.end(), rng);
        items.resize(std::size_t(m));
        std::vector<label_t> proposal = labels;
        std::vector<label_t> picked;
        picked.reserve(std::size_t(m));
        for (int it : items) picked.push_back(labels[std::size_t(it) - 1]);
        std::shuffle(picked.begin(), picked.end(), rng);
        for (int i = 0; i < m; ++i)
          proposal[std::size_t(items[std::size_t(i)]) - 1] =
              picked[std::size_t(i)];
        if (proposal == labels) continue;
        const long long next = dist.total(proposal);
        const long long delta = next - current;
        const bool accept =
            delta <= 0 ||
            uniform01(rng) < std::exp(-power * double(delta));
        if (accept) {
          labels = std::move(proposal);
          current = next;
          state_changed = true;
        }
      }
      if (current < best_total) {
        best_total = current;
        best = labels;
      }
    }
    quiet_temps = state_changed ? 0 : quiet_temps + 1;
    if (quiet_temps >= config.plateau_temps) break;
  }

  if (config.polish) polish_allocation(dist, best, best_total);
  return Allocation::unchecked(std::move(best), L);
}

Allocation anneal_allocation(const RankingDataset& data,
                             const ClusteringTable& ct, DistanceKind kind,
                             const AnnealConfig& config, rng_t& rng) {
  DatasetDistance dist(data, ct, kind);
  return anneal_allocation(dist, config, rng);
}

ThetaFit fit_theta(const RankingDataset& data, const Allocation& z,
                   DistanceKind kind, const ThetaFitConfig& config,
                   std::uint64_t seed) {
  if (config.epsilon <= 0.0) fail(errc::bad_config, "epsilon must be positive");
  const long long data_sum = sum_distance(data, z, kind);
  const double dbar = double(data_sum) / double(data.q());
  if (data_sum == 0)
    fail(errc::zero_mean_distance,
         "observed mean distance is zero; theta is unbounded");

  const int draws = int(std::ceil(1.0 / config.epsilon));
  const long long chain_len = config.chain_len > 0
                                  ? config.chain_len
                                  : default_chain_len(data.n);
  ThetaFit fit;
  fit.data_mean_distance = dbar;
  double theta = config.theta0 > 0.0 ? config.theta0 : 1.0;
  for (int t = 0; t < config.max_iterations; ++t) {
    const CmmParams params{z, theta, kind};
    const long long sim_sum = sample_distance_sum(
        params, chain_len, draws, splitmix64(seed) + std::uint64_t(t),
        config.threads);
    const double sim_mean = double(sim_sum) / double(draws);
    // Simulated spread above the data's means the model is too diffuse:
    // raise theta. The raw multiplicative map overshoots once the mean
    // distance falls steeply in theta (a stable 2-cycle in practice), so
    // the ratio is square-root damped and capped to one octave per step.
    const double ratio =
        std::clamp(std::sqrt(sim_mean / dbar), 0.5, 2.0);
    const double next = theta * ratio;
    fit.iterations = t + 1;
    fit.mc_mean_distance = sim_mean;
    if (std::fabs(next - theta) < config.epsilon) {
      fit.theta = next;
      return fit;
    }
    theta = next;
  }
  fail(errc::non_convergence, "theta iteration failed to settle");
}

MleFit fit_mle(const RankingDataset& data, const ClusteringTable& ct,
               DistanceKind kind, const MleConfig& config) {
  if (!data.all_complete())
    fail(errc::partial_data_not_allowed, "fit_mle requires complete rankings");
  if (ct.num_clusters() == 1) {
    MleFit fit{ct.canonical_allocation(), 0.0, 0, {}};
    return fit;
  }
  DatasetDistance dist(data, ct, kind);
  rng_t rng = make_rng(config.seed, 0x5a);
  MleFit fit{anneal_allocation(dist, config.anneal, rng), 0.0, 0, {}};
  fit.distance_sum = dist.total(fit.z);
  ThetaFitConfig tcfg = config.theta;
  tcfg.threads = config.threads;
  fit.theta_fit = fit_theta(data, fit.z, kind, tcfg, splitmix64(config.seed));
  fit.theta = fit.theta_fit.theta;
  return fit;
}

std::vector<MleFit> bootstrap_refit(const RankingDataset& data,
                                    const ClusteringTable& ct,
                                    DistanceKind kind, const MleConfig& config,
                                    int replicates) {
  std::vector<MleFit> fits;
  fits.reserve(std::size_t(replicates));
  rng_t rng = make_rng(config.seed, 0xb0);
  for (int r = 0; r < replicates; ++r) {
    std::vector<PartialRanking> rows;
    rows.reserve(std::size_t(data.q()));
    for (int j = 0; j < data.q(); ++j)
      rows.push_back(data.rows[std::size_t(uniform_int(rng, 0, data.q() - 1))]);
    RankingDataset resampled = RankingDataset::of(std::move(rows));
    MleConfig cfg = config;
    cfg.seed = splitmix64(config.seed ^ std::uint64_t(r + 1));
    fits.push_back(fit_mle(resampled, ct, kind, cfg));
  }
  return fits;
}

}  // namespace cmm
