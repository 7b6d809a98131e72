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

#include "cmm/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cmm/math_util.hpp"
#include "cmm/sampler.hpp"

namespace cmm {

double GammaPrior::log_pdf(double x) const {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

ZUpdate z_update(std::vector<label_t>& labels, int num_clusters,
                 long long current_sum, const DatasetDistance& dist,
                 double theta, const Priors& priors, int m_switch,
                 rng_t& rng) {
  const int n = int(labels.size());
  ZUpdate result{true, current_sum};
  if (n < 2 || num_clusters < 2) return result;  // only the null move exists

  if (m_switch <= 2) {
    const int a = uniform_int(rng, 1, n);
    int b = uniform_int(rng, 1, n - 1);
    if (b >= a) ++b;
    if (labels[std::size_t(a) - 1] == labels[std::size_t(b) - 1])
      return result;  // z' = z, accepted with probability 1
    const long long delta = dist.swap_delta(labels, a, b);
    double log_alpha = -theta * double(delta);
    if (priors.log_z_mass) {
      std::vector<label_t> proposal = labels;
      std::swap(proposal[std::size_t(a) - 1], proposal[std::size_t(b) - 1]);
      log_alpha +=
          priors.log_z_mass(Allocation::unchecked(proposal, num_clusters)) -
          priors.log_z_mass(Allocation::unchecked(labels, num_clusters));
    }
    if (log_alpha >= 0.0 || uniform01(rng) < std::exp(log_alpha)) {
      std::swap(labels[std::size_t(a) - 1], labels[std::size_t(b) - 1]);
      result.distance_sum = current_sum + delta;
      return result;
    }
    result.accepted = false;
    return result;
  }

  // general m-switch
  std::vector<int> items(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) items[std::size_t(i)] = i + 1;
  std::shuffle(items.begin(), items.end(), rng);
  items.resize(std::size_t(m_switch));
  std::vector<label_t> proposal = labels;
  std::vector<label_t> picked;
  for (int it : items) picked.push_back(labels[std::size_t(it) - 1]);
  std::shuffle(picked.begin(), picked.end(), rng);
  for (std::size_t i = 0; i < items.size(); ++i)
    proposal[std::size_t(items[i]) - 1] = picked[i];
  if (proposal == labels) return result;
  const long long next = dist.total(proposal);
  double log_alpha = -theta * double(next - current_sum);
  if (priors.log_z_mass)
    log_alpha +=
        priors.log_z_mass(Allocation::unchecked(proposal, num_clusters)) -
        priors.log_z_mass(Allocation::unchecked(labels, num_clusters));
  if (log_alpha >= 0.0 || uniform01(rng) < std::exp(log_alpha)) {
    labels = std::move(proposal);
    result.distance_sum = next;
    return result;
  }
  result.accepted = false;
  return result;
}

ThetaUpdate theta_exchange_update(double theta, const Allocation& z,
                                  DistanceKind kind, long long data_sum,
                                  int q, long long aux_chain_len,
                                  const GammaPrior& prior, double log_step,
                                  std::uint64_t aux_seed, int threads,
                                  rng_t& rng) {
  const double proposal = std::exp(std::log(theta) + log_step * normal01(rng));
  // Auxiliary block: q draws at the proposed theta; only their distance
  // statistic enters the ratio.
  long long aux_sum = 0;
  if (q > 0) {
    const CmmParams params{z, proposal, kind};
    aux_sum = sample_distance_sum(params, aux_chain_len, q, aux_seed, threads);
  }
  // prior ratio + data term + auxiliary term + log-normal Hastings factor
  const double log_alpha = prior.log_pdf(proposal) - prior.log_pdf(theta) +
                           (theta - proposal) * double(data_sum) +
                           (proposal - theta) * double(aux_sum) +
                           std::log(proposal) - std::log(theta);
  ThetaUpdate upd{theta, false};
  if (log_alpha >= 0.0 || uniform01(rng) < std::exp(log_alpha)) {
    upd.theta = proposal;
    upd.accepted = true;
  }
  return upd;
}

bool augment_row(DatasetDistance& dist, int row_index,
                 const PartialRanking& observed,
                 std::span<const label_t> z_labels, double theta, rng_t& rng) {
  if (observed.is_complete()) return false;  // no-op
  const std::vector<int> positions = observed.missing_positions();
  std::vector<int> items = observed.missing_items();
  std::shuffle(items.begin(), items.end(), rng);
  std::vector<label_t> slots = observed.slots();
  for (std::size_t k = 0; k < positions.size(); ++k)
    slots[std::size_t(positions[k])] = label_t(items[k]);
  Permutation proposal = Permutation::unchecked(std::move(slots));

  const int current_d = dist.row_distance(row_index, z_labels);
  // proposal distance: compare through a temporary swap-in
  const Permutation current = dist.row(row_index);
  dist.set_row(row_index, proposal);
  const int proposal_d = dist.row_distance(row_index, z_labels);
  const int delta = proposal_d - current_d;
  if (delta <= 0 || uniform01(rng) < std::exp(-theta * double(delta)))
    return true;
  dist.set_row(row_index, current);
  return false;
}

PosteriorTrace run_posterior(const RankingDataset& data,
                             const ClusteringTable& ct, DistanceKind kind,
                             const Priors& priors,
                             const PosteriorConfig& config) {
  if (config.iterations <= config.burn_in)
    fail(errc::bad_config, "iterations must exceed burn_in");
  const int n = ct.n();
  const int q = data.q();
  rng_t rng = make_rng(config.seed, 0xbe5);

  // initial completions: missing items placed uniformly at random
  std::vector<PartialRanking> completed;
  completed.reserve(std::size_t(q));
  for (const auto& row : data.rows) {
    if (row.is_complete()) {
      completed.push_back(row);
      continue;
    }
    std::vector<label_t> slots = row.slots();
    std::vector<int> items = row.missing_items();
    std::shuffle(items.begin(), items.end(), rng);
    const std::vector<int> positions = row.missing_positions();
    for (std::size_t k = 0; k < positions.size(); ++k)
      slots[std::size_t(positions[k])] = label_t(items[k]);
    completed.push_back(
        PartialRanking::from_slots(std::vector<int>(slots.begin(), slots.end())));
  }

  Allocation z0 = Allocation::uniform(ct, rng);
  std::vector<label_t> labels = z0.labels();
  const int L = ct.num_clusters();
  double theta = config.theta0;
  double log_step = config.init_step;

  // q = 0: the chain has no data term and should reproduce the prior.
  RankingDataset work =
      q > 0 ? RankingDataset::of(std::move(completed)) : RankingDataset::empty(n);
  DatasetDistance dist =
      q > 0 ? DatasetDistance(work, ct, kind)
            : DatasetDistance(
                  RankingDataset::of_permutations({Permutation::identity(n)}),
                  ct, kind);
  long long dist_sum = q > 0 ? dist.total(labels) : 0;

  PosteriorTrace trace;
  trace.n = n;
  trace.burn_in = config.burn_in;
  trace.theta.reserve(std::size_t(config.iterations));

  for (int t = 0; t < config.iterations; ++t) {
    // 1. data augmentation for partial rows
    int aug_accepts = 0;
    if (q > 0 && !data.all_complete()) {
      for (int j = 0; j < q; ++j) {
        if (data.rows[std::size_t(j)].is_complete()) continue;
        if (augment_row(dist, j, data.rows[std::size_t(j)], labels, theta,
                        rng))
          ++aug_accepts;
      }
      dist_sum = dist.total(labels);
    }

    // 2. allocation move(s)
    bool z_acc = false;
    if (q > 0) {
      for (int mv = 0; mv < config.z_moves_per_iter; ++mv) {
        const ZUpdate upd = z_update(labels, L, dist_sum, dist, theta, priors,
                                     config.m_switch, rng);
        z_acc = z_acc || upd.accepted;
        dist_sum = upd.distance_sum;
      }
    }

    // 3. concentration move via the exchange update
    const std::uint64_t aux_seed =
        splitmix64(config.seed ^ 0xa0c7u) + std::uint64_t(t);
    const Allocation z = Allocation::unchecked(labels, L);
    const ThetaUpdate tu = theta_exchange_update(
        theta, z, kind, dist_sum, q, config.aux_chain_len, priors.theta,
        log_step, aux_seed, config.threads, rng);
    theta = tu.theta;

    // vanishing adaptation of the proposal scale during burn-in
    if (t < config.burn_in) {
      const double gamma = 1.0 / std::sqrt(double(t) + 1.0);
      log_step *=
          std::exp(gamma * ((tu.accepted ? 1.0 : 0.0) - config.target_accept));
      log_step = std::clamp(log_step, 1e-3, 10.0);
    }

    double log_target = -theta * double(dist_sum) + priors.theta.log_pdf(theta);
    if (priors.log_z_mass) log_target += priors.log_z_mass(z);
    trace.theta.push_back(theta);
    trace.z.push_back(labels);
    trace.log_target.push_back(log_target);
    trace.distance_sum.push_back(dist_sum);
    trace.z_accepted.push_back(z_acc ? 1 : 0);
    trace.theta_accepted.push_back(tu.accepted ? 1 : 0);
    trace.augment_accepts.push_back(aug_accepts);
    if (config.inspect) config.inspect(t, dist, z, theta);
  }
  return trace;
}

std::vector<double> PosteriorTrace::theta_post() const {
  return std::vector<double>(theta.begin() + burn_in, theta.end());
}

double PosteriorTrace::theta_mean() const {
  const auto post = theta_post();
  return mean(post);
}

double PosteriorTrace::theta_quantile(double p) const {
  return quantile(theta_post(), p);
}

double PosteriorTrace::theta_map() const {
  return fd_histogram_mode(theta_post());
}

Allocation PosteriorTrace::map_allocation() const {
  struct Stat {
    int count = 0;
    double log_target_sum = 0.0;
  };
  std::map<std::vector<label_t>, Stat> visits;
  for (std::size_t t = std::size_t(burn_in); t < z.size(); ++t) {
    Stat& s = visits[z[t]];
    ++s.count;
    s.log_target_sum += log_target[t];
  }
  const std::vector<label_t>* best = nullptr;
  double best_count = -1, best_mean = 0;
  for (const auto& [labels, stat] : visits) {
    const double m = stat.log_target_sum / stat.count;
    if (stat.count > best_count ||
        (stat.count == best_count && m > best_mean)) {
      best = &labels;
      best_count = stat.count;
      best_mean = m;
    }
  }
  int L = 0;
  for (label_t l : *best) L = std::max(L, int(l));
  return Allocation::unchecked(*best, L);
}

double PosteriorTrace::z_accept_rate() const {
  double s = 0;
  for (auto v : z_accepted) s += v;
  return s / double(z_accepted.size());
}

double PosteriorTrace::theta_accept_rate() const {
  double s = 0;
  for (auto v : theta_accepted) s += v;
  return s / double(theta_accepted.size());
}

}  // namespace cmm
