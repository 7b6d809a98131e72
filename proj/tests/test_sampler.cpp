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

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "cmm/math_util.hpp"
#include "cmm/pseudo.hpp"
#include "cmm/sampler.hpp"

using namespace cmm;

namespace {

Allocation alloc(std::vector<int> labels) {
  return Allocation::from_labels(labels);
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("chain distance bookkeeping stays exact") {
  rng_t rng = make_rng(12);
  for (DistanceKind kind :
       {DistanceKind::hamming_oc, DistanceKind::kendall_oc}) {
    const Allocation z = alloc({1, 2, 2, 3, 3, 3, 1});
    const CmmParams params{z, 0.8, kind};
    CmmChain chain(params, rng);
    for (int s = 0; s < 20000; ++s) {
      chain.step(rng);
      if (s % 100 == 0)
        REQUIRE(chain.distance() == oc_distance(chain.state(), z, kind));
    }
  }
}

TEST_CASE("theta zero accepts every proposal") {
  const Allocation z = alloc({1, 1, 2, 2});
  const CmmParams params{z, 0.0, DistanceKind::kendall_oc};
  rng_t rng = make_rng(13);
  CmmChain chain(params, rng);
  for (int s = 0; s < 500; ++s) {
    const std::vector<label_t> before(chain.state_order().begin(),
                                      chain.state_order().end());
    chain.step(rng);
    const std::vector<label_t> after(chain.state_order().begin(),
                                     chain.state_order().end());
    CHECK(after != before);  // a transposition always lands
  }
}

TEST_CASE("improving proposals are always taken") {
  // at very large theta only distance-reducing (or neutral) moves pass
  const Allocation z = alloc({1, 1, 2, 2, 3});
  const CmmParams params{z, 60.0, DistanceKind::kendall_oc};
  rng_t rng = make_rng(14);
  CmmChain chain(params, rng);
  int prev = chain.distance();
  for (int s = 0; s < 20000; ++s) {
    chain.step(rng);
    CHECK(chain.distance() <= prev);
    prev = chain.distance();
  }
  CHECK(prev == 0);  // the chain reaches the consensus set
}

TEST_CASE("stationary frequencies match the exact distribution") {
  const Allocation z = alloc({1, 1, 2, 2});
  for (DistanceKind kind :
       {DistanceKind::hamming_oc, DistanceKind::kendall_oc}) {
    const CmmParams params{z, 0.5, kind};
    const double log_psi = exact_log_psi(0.5, z, kind);
    rng_t rng = make_rng(kind == DistanceKind::hamming_oc ? 15 : 16);
    CmmChain chain(params, rng);
    chain.run(2000, rng);  // settle in
    const int thin = 25;
    const int samples = 120000;
    std::map<std::vector<label_t>, int> freq;
    for (int s = 0; s < samples; ++s) {
      chain.run(thin, rng);
      ++freq[std::vector<label_t>(chain.state_order().begin(),
                                  chain.state_order().end())];
    }
    double chi2 = 0.0;
    int cells = 0;
    std::vector<label_t> buf;
    for_each_permutation(4, [&](const std::uint8_t* items) {
      buf.assign(items, items + 4);
      const Permutation pi = Permutation::unchecked(buf);
      const double p = std::exp(log_prob(pi, params, log_psi));
      const double expected = p * samples;
      const double observed = double(freq[pi.order()]);
      chi2 += (observed - expected) * (observed - expected) / expected;
      ++cells;
      const double se = std::sqrt(p * (1.0 - p) * samples);
      CHECK(std::fabs(observed - expected) < 4.0 * se + 5.0);
    });
    CHECK(chi_square_sf(chi2, double(cells - 1)) > 0.005);
  }
}

TEST_CASE("metropolis_step wraps one transition") {
  const Allocation z = alloc({1, 1, 2});
  const CmmParams params{z, 0.4, DistanceKind::hamming_oc};
  rng_t rng = make_rng(17);
  const Permutation start = Permutation::identity(3);
  const Permutation next = metropolis_step(start, params, rng);
  CHECK(next.n() == 3);  // either the proposal or the start, both valid
}

TEST_CASE("uniform draws at theta zero balance the preference matrix") {
  const Allocation z = alloc({1, 1, 2, 2, 3});
  SamplerConfig cfg;
  cfg.n_chains = 400;
  cfg.seed = 18;
  cfg.threads = 2;
  const RankingDataset draws =
      sample_rankings(CmmParams{z, 0.0, DistanceKind::kendall_oc}, cfg);
  const PreferenceMatrix m = preference_matrix(draws);
  const double se = std::sqrt(0.25 / 400.0);
  for (int i = 1; i <= 5; ++i)
    for (int j = i + 1; j <= 5; ++j)
      CHECK(std::fabs(m.pbar(i, j) - 0.5) < 4.0 * se);
}

TEST_CASE("degenerate concentration pins the consensus") {
  const Allocation z = alloc({1, 1, 2, 2, 3, 3});
  SamplerConfig cfg;
  cfg.n_chains = 200;
  cfg.seed = 19;
  cfg.chain_len = 4 * default_chain_len(6);
  const CmmParams params{z, 50.0, DistanceKind::hamming_oc};
  const RankingDataset draws = sample_rankings(params, cfg);
  for (int j = 0; j < draws.q(); ++j)
    CHECK(oc_distance_hamming(draws.row_permutation(j), z) == 0);
}

TEST_CASE("draws are reproducible and scheduling independent") {
  const Allocation z = alloc({1, 2, 2, 3});
  const CmmParams params{z, 1.0, DistanceKind::kendall_oc};
  SamplerConfig one{0, 50, 77, 1};
  SamplerConfig two{0, 50, 77, 2};
  const RankingDataset a = sample_rankings(params, one);
  const RankingDataset b = sample_rankings(params, two);
  REQUIRE(a.q() == b.q());
  for (int j = 0; j < a.q(); ++j)
    CHECK(a.rows[std::size_t(j)] == b.rows[std::size_t(j)]);
  // different chains see different sub-seeds
  bool all_same = true;
  for (int j = 1; j < a.q(); ++j)
    all_same = all_same && (a.rows[0] == a.rows[std::size_t(j)]);
  CHECK(!all_same);
}

TEST_CASE("distance-sum fast path equals the materialized draws") {
  const Allocation z = alloc({1, 1, 2, 3});
  const CmmParams params{z, 0.9, DistanceKind::kendall_oc};
  SamplerConfig cfg{30, 64, 123, 2};
  const RankingDataset draws = sample_rankings(params, cfg);
  long long direct = 0;
  for (int j = 0; j < draws.q(); ++j)
    direct += oc_distance(draws.row_permutation(j), z, params.kind);
  CHECK(sample_distance_sum(params, 30, 64, 123, 2) == direct);
}

TEST_CASE("empirical distance histogram matches enumeration") {
  // total-variation check against the exact distance distribution
  const Allocation z = alloc({1, 1, 2, 2, 3, 3});
  for (DistanceKind kind :
       {DistanceKind::hamming_oc, DistanceKind::kendall_oc}) {
    const double theta = 0.7;
    const auto counts = distance_histogram(z, kind);
    std::vector<double> exact(counts.size(), 0.0);
    double norm = 0.0;
    for (std::size_t d = 0; d < counts.size(); ++d) {
      exact[d] = double(counts[d]) * std::exp(-theta * double(d));
      norm += exact[d];
    }
    for (double& p : exact) p /= norm;

    SamplerConfig cfg;
    cfg.n_chains = 20000;
    cfg.seed = kind == DistanceKind::hamming_oc ? 21 : 22;
    cfg.threads = 2;
    const RankingDataset draws = sample_rankings(CmmParams{z, theta, kind}, cfg);
    std::vector<double> freq(counts.size(), 0.0);
    for (int j = 0; j < draws.q(); ++j)
      freq[std::size_t(oc_distance(draws.row_permutation(j), z, kind))] +=
          1.0 / draws.q();
    double tv = 0.0;
    for (std::size_t d = 0; d < counts.size(); ++d)
      tv += std::fabs(freq[d] - exact[d]);
    CHECK(tv / 2.0 < 0.03);
  }
}

}  // TEST_SUITE
