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

#include "cmm/pseudo.hpp"

#include <algorithm>
#include <cmath>

#include "cmm/kernels.hpp"
#include "cmm/parallel.hpp"

namespace cmm {

StageState StageState::initial(const Allocation& z) {
  StageState s;
  s.remaining.assign(std::size_t(z.num_clusters()), 0);
  for (label_t l : z.labels()) ++s.remaining[std::size_t(l) - 1];
  return s;
}

int StageState::total() const {
  int t = 0;
  for (int c : remaining) t += c;
  return t;
}

int StageState::smallest_nonempty() const {
  for (std::size_t l = 0; l < remaining.size(); ++l)
    if (remaining[l] > 0) return int(l) + 1;
  fail(errc::empty_stage, "no unranked items left");
}

void StageState::remove_one(int cluster) {
  --remaining[std::size_t(cluster) - 1];
}

int stage_penalty(int cluster, const StageState& stage) {
  if (cluster == stage.smallest_nonempty()) return 0;
  return stage.remaining[std::size_t(cluster) - 1];
}

std::vector<double> stage_cluster_probs(const StageState& stage,
                                        double theta) {
  const int lowest = stage.smallest_nonempty();
  const std::size_t L = stage.remaining.size();
  std::vector<double> probs(L, 0.0);
  double norm = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    if (stage.remaining[l] == 0) continue;
    const int penalty = (int(l) + 1 == lowest) ? 0 : stage.remaining[l];
    probs[l] = std::exp(-theta * double(penalty));
    norm += probs[l];
  }
  for (double& p : probs) p /= norm;
  return probs;
}

namespace {

// One stage of the evaluation walk: log of the realized cluster's stage
// probability. Terms are at most 1 and the normalizer at least 1, so the
// plain sum is stable.
inline double stage_log_prob(const std::vector<int>& remaining, int realized,
                             double theta) {
  int lowest = 0;
  for (std::size_t l = 0; l < remaining.size(); ++l)
    if (remaining[l] > 0) {
      lowest = int(l) + 1;
      break;
    }
  double norm = 0.0;
  double realized_term = 0.0;
  for (std::size_t l = 0; l < remaining.size(); ++l) {
    if (remaining[l] == 0) continue;
    const int penalty = (int(l) + 1 == lowest) ? 0 : remaining[l];
    const double t = std::exp(-theta * double(penalty));
    norm += t;
    if (int(l) + 1 == realized) realized_term = t;
  }
  return std::log(realized_term) - std::log(norm);
}

}  // namespace

double pseudo_log_prob(const Permutation& pi, const CmmParams& params) {
  if (pi.n() != params.z.n())
    fail(errc::dimension_mismatch, "permutation and allocation sizes differ");
  const int n = pi.n();
  std::vector<int> remaining(std::size_t(params.z.num_clusters()), 0);
  for (label_t l : params.z.labels()) ++remaining[std::size_t(l) - 1];
  double lp = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    const int l = params.z.label_of(pi.item_at(i));
    lp += stage_log_prob(remaining, l, params.theta);
    lp -= std::log(double(remaining[std::size_t(l) - 1]));
    --remaining[std::size_t(l) - 1];
  }
  return lp;
}

Permutation pseudo_sample(const CmmParams& params, rng_t& rng,
                          double* log_prob_out) {
  const int n = params.z.n();
  const int L = params.z.num_clusters();
  std::vector<int> remaining(std::size_t(L), 0);
  std::vector<std::vector<label_t>> pool(static_cast<std::size_t>(L));
  for (int item = 1; item <= n; ++item) {
    const int l = params.z.label_of(item);
    ++remaining[std::size_t(l) - 1];
    pool[std::size_t(l) - 1].push_back(label_t(item));
  }
  std::vector<label_t> order;
  order.reserve(std::size_t(n));
  double lp = 0.0;
  std::vector<double> weights(static_cast<std::size_t>(L));
  for (int i = 0; i < n - 1; ++i) {
    int lowest = 0;
    double norm = 0.0;
    for (int l = 0; l < L; ++l) {
      if (remaining[std::size_t(l)] == 0) {
        weights[std::size_t(l)] = 0.0;
        continue;
      }
      if (lowest == 0) lowest = l + 1;
      const int penalty = (l + 1 == lowest) ? 0 : remaining[std::size_t(l)];
      weights[std::size_t(l)] = std::exp(-params.theta * double(penalty));
      norm += weights[std::size_t(l)];
    }
    const double u = uniform01(rng) * norm;
    int chosen = lowest;
    double acc = 0.0;
    for (int l = 0; l < L; ++l) {
      if (weights[std::size_t(l)] == 0.0) continue;
      acc += weights[std::size_t(l)];
      if (u <= acc) {
        chosen = l + 1;
        break;
      }
    }
    auto& bucket = pool[std::size_t(chosen) - 1];
    const int pick = uniform_int(rng, 0, int(bucket.size()) - 1);
    order.push_back(bucket[std::size_t(pick)]);
    bucket[std::size_t(pick)] = bucket.back();
    bucket.pop_back();
    lp += std::log(weights[std::size_t(chosen) - 1]) - std::log(norm);
    lp -= std::log(double(remaining[std::size_t(chosen) - 1]));
    --remaining[std::size_t(chosen) - 1];
  }
  // final item is forced
  for (int l = 0; l < L; ++l)
    if (!pool[std::size_t(l)].empty()) order.push_back(pool[std::size_t(l)][0]);
  if (log_prob_out != nullptr) *log_prob_out = lp;
  return Permutation::unchecked(std::move(order));
}

IsEstimate estimate_log_psi(double theta, const Allocation& z,
                            DistanceKind kind, long long num_draws,
                            std::uint64_t seed, int threads) {
  if (num_draws < 1) fail(errc::bad_config, "need at least one draw");
  const CmmParams params{z, theta, kind};
  constexpr long long kBlock = 4096;
  const long long n_blocks = (num_draws + kBlock - 1) / kBlock;

  struct BlockStat {
    double max_logw = 0.0;
    double sum = 0.0;    // sum exp(logw - max_logw)
    double sum_sq = 0.0; // sum exp(2*(logw - max_logw))
  };
  std::vector<BlockStat> stats(static_cast<std::size_t>(n_blocks));

  parallel_for(std::size_t(n_blocks), threads, [&](std::size_t b) {
    rng_t rng = make_rng(seed, b);
    DistanceContext ctx(z, kind);
    std::vector<std::uint8_t> buf(kern::padded_size(std::size_t(z.n())), 0);
    const long long lo = (long long)(b)*kBlock;
    const long long hi = std::min(num_draws, lo + kBlock);
    std::vector<double> logw;
    logw.reserve(std::size_t(hi - lo));
    for (long long s = lo; s < hi; ++s) {
      double lf = 0.0;
      const Permutation pi = pseudo_sample(params, rng, &lf);
      std::copy(pi.order().begin(), pi.order().end(), buf.begin());
      const int d = ctx.distance_bytes(buf.data());
      logw.push_back(-theta * double(d) - lf);
    }
    BlockStat st;
    st.max_logw = *std::max_element(logw.begin(), logw.end());
    for (double w : logw) {
      const double e = std::exp(w - st.max_logw);
      st.sum += e;
      st.sum_sq += e * e;
    }
    stats[b] = st;
  });

  double gmax = stats[0].max_logw;
  for (const auto& st : stats) gmax = std::max(gmax, st.max_logw);
  double total = 0.0, total_sq = 0.0;
  for (const auto& st : stats) {
    const double scale = std::exp(st.max_logw - gmax);
    total += st.sum * scale;
    total_sq += st.sum_sq * scale * scale;
  }
  if (!(total > 0.0))
    fail(errc::degenerate_weights, "all importance weights vanished");

  const double m = double(num_draws);
  const double w_mean = total / m;
  const double w_var = std::max(0.0, total_sq / m - w_mean * w_mean);
  IsEstimate est;
  est.log_psi = gmax + std::log(w_mean);
  est.se_log = std::sqrt(w_var / m) / w_mean;
  est.samples = num_draws;
  return est;
}

}  // namespace cmm
