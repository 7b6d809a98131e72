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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "cmm/bayes.hpp"
#include "cmm/math_util.hpp"
#include "cmm/sampler.hpp"

using namespace cmm;

namespace {

Allocation alloc(std::vector<int> labels) {
  return Allocation::from_labels(labels);
}

RankingDataset simulate(const Allocation& z, double theta, DistanceKind kind,
                        int q, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.n_chains = q;
  cfg.seed = seed;
  cfg.threads = 2;
  return sample_rankings(CmmParams{z, theta, kind}, cfg);
}

// hide everything after the first k positions
RankingDataset topk_of(const RankingDataset& data, int k) {
  std::vector<PartialRanking> rows;
  for (int j = 0; j < data.q(); ++j) {
    std::vector<int> slots(std::size_t(data.n), kMissingSlot);
    for (int i = 0; i < k; ++i)
      slots[std::size_t(i)] = data.rows[std::size_t(j)].slot(i);
    rows.push_back(PartialRanking::from_slots(slots));
  }
  return RankingDataset::of(std::move(rows));
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("gamma prior density") {
  const GammaPrior p{2.0, 2.0};
  // Gamma(2,2): f(x) = 4 x exp(-2x)
  for (double x : {0.2, 0.8, 1.7})
    CHECK(p.log_pdf(x) ==
          doctest::Approx(std::log(4.0 * x * std::exp(-2.0 * x)))
              .epsilon(1e-12));
  CHECK(p.log_pdf(-1.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("null switches are accepted and change nothing") {
  const auto data = simulate(alloc({1, 1, 2}), 1.0,
                             DistanceKind::hamming_oc, 10, 1);
  DatasetDistance dist(data, clustering_table(alloc({1, 1, 2})),
                       DistanceKind::hamming_oc);
  Priors priors;
  rng_t rng = make_rng(2);
  // items 1 and 2 share a cluster: whenever that pair is drawn the move is
  // a null switch; run many updates and require every null to be accepted
  int nulls = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<label_t> labels{1, 1, 2};
    const long long sum = dist.total(std::span<const label_t>(labels));
    const ZUpdate upd = z_update(labels, 2, sum, dist, 1.0, priors, 2, rng);
    if (labels == std::vector<label_t>{1, 1, 2} && upd.accepted &&
        upd.distance_sum == sum)
      ++nulls;
  }
  CHECK(nulls > 0);
}

TEST_CASE("distance-lowering switches are accepted surely") {
  // at large theta only improving or null moves pass
  rng_t rng = make_rng(3);
  const Allocation truth = alloc({1, 1, 2, 2, 3});
  const auto data = simulate(truth, 3.0, DistanceKind::kendall_oc, 100, 4);
  DatasetDistance dist(data, clustering_table(truth),
                       DistanceKind::kendall_oc);
  Priors priors;
  std::vector<label_t> labels = Allocation::uniform(
      clustering_table(truth), rng).labels();
  long long sum = dist.total(std::span<const label_t>(labels));
  for (int t = 0; t < 400; ++t) {
    const long long before = sum;
    const ZUpdate upd =
        z_update(labels, 3, sum, dist, 12.0, priors, 2, rng);
    sum = upd.distance_sum;
    CHECK(sum <= before);
  }
  CHECK(sum == dist.total(std::span<const label_t>(labels)));
}

TEST_CASE("fixed-theta allocation chain recovers the truth") {
  const Allocation truth = alloc({1, 1, 2, 2, 3, 3});
  const double theta = 1.5;
  const int reps = 25;
  int recovered = 0;
  for (int r = 0; r < reps; ++r) {
    const auto data =
        simulate(truth, theta, DistanceKind::kendall_oc, 300,
                 2100 + std::uint64_t(r));
    DatasetDistance dist(data, clustering_table(truth),
                         DistanceKind::kendall_oc);
    rng_t rng = make_rng(50, std::uint64_t(r));
    std::vector<label_t> labels =
        Allocation::uniform(clustering_table(truth), rng).labels();
    long long sum = dist.total(std::span<const label_t>(labels));
    Priors priors;
    std::map<std::vector<label_t>, int> visits;
    for (int t = 0; t < 600; ++t) {
      const ZUpdate upd = z_update(labels, 3, sum, dist, theta, priors, 2, rng);
      sum = upd.distance_sum;
      if (t >= 100) ++visits[labels];
    }
    const auto mode = std::max_element(
        visits.begin(), visits.end(),
        [](const auto& a, const auto& b) { return a.second < b.second; });
    recovered += (mode->first == truth.labels());
  }
  CHECK(recovered >= int(0.9 * reps));
}

TEST_CASE("identity proposal is always exchanged") {
  // a zero-width proposal step makes theta' = theta exactly; the ratio is
  // then one by symmetry
  const Allocation z = alloc({1, 1, 2, 2});
  rng_t rng = make_rng(5);
  for (int t = 0; t < 20; ++t) {
    const ThetaUpdate upd = theta_exchange_update(
        0.8, z, DistanceKind::kendall_oc, 40, 10, 50, GammaPrior{}, 0.0,
        std::uint64_t(t), 1, rng);
    CHECK(upd.accepted);
    CHECK(upd.theta == doctest::Approx(0.8));
  }
}

TEST_CASE("with no data the chain reproduces the prior") {
  PosteriorConfig cfg;
  cfg.iterations = 12000;
  cfg.burn_in = 2000;
  cfg.seed = 6;
  const PosteriorTrace trace =
      run_posterior(RankingDataset::empty(5),
                    ClusteringTable::from_sizes(std::vector<int>{2, 2, 1}),
                    DistanceKind::kendall_oc, Priors{}, cfg);
  auto post = trace.theta_post();
  std::sort(post.begin(), post.end());
  double ks = 0.0;
  const double m = double(post.size());
  for (std::size_t i = 0; i < post.size(); ++i) {
    const double cdf = gamma_cdf(post[i], 2.0, 2.0);
    ks = std::max(ks, std::fabs(cdf - double(i + 1) / m));
    ks = std::max(ks, std::fabs(cdf - double(i) / m));
  }
  CHECK(ks < 0.05);
}

TEST_CASE("augmentation keeps rows consistent with their observations") {
  const Allocation truth = alloc({1, 2, 3, 4, 4, 4});
  const auto complete =
      simulate(truth, 1.2, DistanceKind::kendall_oc, 40, 7);
  const auto partial = topk_of(complete, 3);
  PosteriorConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 50;
  cfg.seed = 8;
  int checked = 0;
  cfg.inspect = [&](int, const DatasetDistance& dist, const Allocation& z,
                    double) {
    REQUIRE(clustering_table(z).sizes() == std::vector<int>{1, 1, 1, 3});
    for (int j = 0; j < partial.q(); ++j) {
      const Permutation row = dist.row(j);
      for (int i = 0; i < partial.n; ++i) {
        const int observed = partial.rows[std::size_t(j)].slot(i);
        if (observed != kMissingSlot) REQUIRE(row.item_at(i) == observed);
      }
    }
    ++checked;
  };
  run_posterior(partial, ClusteringTable::from_sizes(std::vector<int>{1, 1, 1, 3}),
                DistanceKind::kendall_oc, Priors{}, cfg);
  CHECK(checked == 300);
}

TEST_CASE("single missing slot has a forced, always-accepted completion") {
  std::vector<int> slots{2, 0, 3, 4};  // only item 1 unplaced
  const PartialRanking row = PartialRanking::from_slots(slots);
  const auto dummy = RankingDataset::of_permutations(
      {Permutation::from_order(std::vector<int>{2, 1, 3, 4})});
  DatasetDistance dist(dummy, ClusteringTable::from_sizes(
                                  std::vector<int>{2, 2}),
                       DistanceKind::hamming_oc);
  rng_t rng = make_rng(9);
  const std::vector<label_t> z{1, 1, 2, 2};
  const bool accepted =
      augment_row(dist, 0, row, std::span<const label_t>(z), 1.0, rng);
  CHECK(accepted);
  CHECK(dist.row(0) == Permutation::from_order(std::vector<int>{2, 1, 3, 4}));
}

TEST_CASE("posterior runs are reproducible") {
  const Allocation truth = alloc({1, 1, 2, 2});
  const auto data = simulate(truth, 1.0, DistanceKind::hamming_oc, 50, 10);
  PosteriorConfig cfg;
  cfg.iterations = 400;
  cfg.burn_in = 100;
  cfg.seed = 11;
  const PosteriorTrace a = run_posterior(data, clustering_table(truth),
                                         DistanceKind::hamming_oc, Priors{},
                                         cfg);
  const PosteriorTrace b = run_posterior(data, clustering_table(truth),
                                         DistanceKind::hamming_oc, Priors{},
                                         cfg);
  CHECK(a.theta == b.theta);
  CHECK(a.z == b.z);
  CHECK(a.log_target == b.log_target);
}

TEST_CASE("joint posterior concentrates near the generating parameters") {
  // a scaled preview of the coverage study in the acceptance suite
  const Allocation truth = alloc({1, 1, 2, 2, 3, 3});
  const double theta_star = 0.8;
  const int reps = 5;
  int z_hits = 0, ci_hits = 0;
  for (int r = 0; r < reps; ++r) {
    const auto data = simulate(truth, theta_star, DistanceKind::kendall_oc,
                               300, 3200 + std::uint64_t(r));
    PosteriorConfig cfg;
    cfg.iterations = 1500;
    cfg.burn_in = 300;
    cfg.seed = 120 + std::uint64_t(r);
    cfg.threads = 2;
    const PosteriorTrace trace =
        run_posterior(data, clustering_table(truth), DistanceKind::kendall_oc,
                      Priors{}, cfg);
    z_hits += (trace.map_allocation() == truth);
    const double lo = trace.theta_quantile(0.025);
    const double hi = trace.theta_quantile(0.975);
    ci_hits += (lo <= theta_star && theta_star <= hi);
  }
  CHECK(z_hits >= 4);
  CHECK(ci_hits >= 4);
}

TEST_CASE("the posterior path never touches the normalizer") {
  std::ifstream src(std::string(CMM_SOURCE_DIR) + "/src/bayes.cpp");
  REQUIRE(src.good());
  std::stringstream buf;
  buf << src.rdbuf();
  const std::string text = buf.str();
  CHECK(text.find("log_psi") == std::string::npos);
  CHECK(text.find("pseudo.hpp") == std::string::npos);
  CHECK(text.find("model.hpp") == std::string::npos);
}

}  // TEST_SUITE
