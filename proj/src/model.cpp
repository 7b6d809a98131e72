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

#include "cmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmm/kernels.hpp"
#include "cmm/math_util.hpp"
#include "cmm/parallel.hpp"
#include "cmm/sampler.hpp"

namespace cmm {

namespace {

void check_enumeration(int n, int cap) {
  if (n > cap)
    fail(errc::too_large_for_enumeration,
         "n = " + std::to_string(n) + " exceeds the enumeration cap of " +
             std::to_string(cap));
}

void check_theta(double theta) {
  if (theta < 0.0 || !std::isfinite(theta))
    fail(errc::bad_config, "theta must be nonnegative");
}

}  // namespace

void for_each_permutation(int n,
                          const std::function<void(const std::uint8_t*)>& fn) {
  std::vector<std::uint8_t> buf(kern::padded_size(std::size_t(n)), 0);
  std::iota(buf.begin(), buf.begin() + n, std::uint8_t(1));
  do {
    fn(buf.data());
  } while (std::next_permutation(buf.begin(), buf.begin() + n));
}

std::vector<std::uint64_t> distance_histogram(const Allocation& z,
                                              DistanceKind kind, int cap) {
  const int n = z.n();
  check_enumeration(n, cap);
  const DistanceContext ctx(z, kind);
  std::vector<std::uint64_t> counts(std::size_t(n * (n - 1) / 2 + 1), 0);
  for_each_permutation(
      n, [&](const std::uint8_t* items) { ++counts[ctx.distance_bytes(items)]; });
  while (counts.size() > 1 && counts.back() == 0) counts.pop_back();
  return counts;
}

double exact_log_psi(double theta, const Allocation& z, DistanceKind kind,
                     int cap) {
  check_theta(theta);
  const std::vector<std::uint64_t> counts = distance_histogram(z, kind, cap);
  std::vector<double> terms;
  terms.reserve(counts.size());
  for (std::size_t d = 0; d < counts.size(); ++d)
    if (counts[d] > 0)
      terms.push_back(std::log(double(counts[d])) - theta * double(d));
  return log_sum_exp(terms);
}

double log_prob(const Permutation& pi, const CmmParams& params,
                double log_psi) {
  check_theta(params.theta);
  return -params.theta * oc_distance(pi, params.z, params.kind) - log_psi;
}

RcMatrix rank_cluster_exact(const CmmParams& params, int cap) {
  check_theta(params.theta);
  const int n = params.z.n();
  const int L = params.z.num_clusters();
  check_enumeration(n, cap);
  const DistanceContext ctx(params.z, params.kind);
  const std::uint8_t* lut = ctx.label_lut();
  RcMatrix rc;
  rc.n = n;
  rc.num_clusters = L;
  rc.p.assign(std::size_t(n) * std::size_t(L), 0.0);
  double psi = 0.0;
  for_each_permutation(n, [&](const std::uint8_t* items) {
    const double w = std::exp(-params.theta * ctx.distance_bytes(items));
    psi += w;
    for (int i = 0; i < n; ++i)
      rc.p[std::size_t(i) * std::size_t(L) + std::size_t(lut[items[i]] - 1)] +=
          w;
  });
  for (double& v : rc.p) v /= psi;
  return rc;
}

RcMatrix rank_cluster_mc(const CmmParams& params, int n_samples,
                         long long chain_len, std::uint64_t seed,
                         int threads) {
  check_theta(params.theta);
  const int n = params.z.n();
  const int L = params.z.num_clusters();
  if (chain_len <= 0) chain_len = default_chain_len(n);
  std::vector<std::uint8_t> draws(std::size_t(n_samples) * std::size_t(n));
  parallel_for(std::size_t(n_samples), threads, [&](std::size_t c) {
    rng_t rng = make_rng(seed, c);
    CmmChain chain(params, rng);
    chain.run(chain_len, rng);
    std::copy_n(chain.state_order().begin(), n,
                draws.begin() + c * std::size_t(n));
  });
  RcMatrix rc;
  rc.n = n;
  rc.num_clusters = L;
  rc.p.assign(std::size_t(n) * std::size_t(L), 0.0);
  for (int s = 0; s < n_samples; ++s) {
    const std::uint8_t* row = draws.data() + std::size_t(s) * std::size_t(n);
    for (int i = 0; i < n; ++i) {
      const int l = params.z.label_of(row[i]) - 1;
      rc.p[std::size_t(i) * std::size_t(L) + std::size_t(l)] += 1.0;
    }
  }
  for (double& v : rc.p) v /= double(n_samples);
  return rc;
}

}  // namespace cmm
