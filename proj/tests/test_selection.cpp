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
#include <set>
#include <vector>

#include "cmm/math_util.hpp"
#include "cmm/model.hpp"
#include "cmm/sampler.hpp"
#include "cmm/selection.hpp"

using namespace cmm;

namespace {

Allocation alloc(std::vector<int> labels) {
  return Allocation::from_labels(labels);
}

ClusteringTable table(std::vector<int> sizes) {
  return ClusteringTable::from_sizes(sizes);
}

RankingDataset simulate(const Allocation& z, double theta, DistanceKind kind,
                        int q, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.n_chains = q;
  cfg.seed = seed;
  cfg.threads = 2;
  return sample_rankings(CmmParams{z, theta, kind}, cfg);
}

std::set<std::vector<int>> neighbor_set(const ClusteringTable& ct) {
  std::set<std::vector<int>> out;
  for (const auto& t : neighbor_tables(ct)) out.insert(t.sizes());
  return out;
}

int shift_distance(const ClusteringTable& a, const ClusteringTable& b) {
  // breadth-limited: 0 if equal, 1 if adjacent, else 2+
  if (a.sizes() == b.sizes()) return 0;
  for (const auto& t : neighbor_tables(a))
    if (t.sizes() == b.sizes()) return 1;
  return 2;
}

}  // namespace

TEST_SUITE("selection") {

TEST_CASE("allocation-count penalty") {
  CHECK(log_ct_prior(table({4})) == doctest::Approx(0.0));
  CHECK(log_ct_prior(table({1, 1, 1, 1})) ==
        doctest::Approx(-log_factorial(4)).epsilon(1e-12));
  CHECK(log_ct_prior(table({2, 2})) ==
        doctest::Approx(-std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("criterion with the exact normalizer as oracle") {
  rng_t rng = make_rng(200);
  for (int n : {4, 5, 6}) {
    const Allocation z = Allocation::uniform(table({1, n - 2, 1}), rng);
    const auto data = simulate(z, 0.8, DistanceKind::kendall_oc, 60,
                               300 + std::uint64_t(n));
    const double theta = 0.8;
    const double exact_value =
        -theta * double(sum_distance(data, z, DistanceKind::kendall_oc)) -
        double(data.q()) * exact_log_psi(theta, z, DistanceKind::kendall_oc) +
        log_ct_prior(z);
    const Criterion est = info_criterion(data, z, theta,
                                         DistanceKind::kendall_oc, 100000,
                                         41, 2);
    CHECK(std::fabs(est.value - exact_value) < 3.5 * est.se + 1e-6);
  }
}

TEST_CASE("whole-item-set table scores exactly minus q log n!") {
  const Allocation z = alloc({1, 1, 1, 1, 1});
  const auto data = simulate(alloc({1, 2, 3, 4, 5}), 1.0,
                             DistanceKind::kendall_oc, 30, 5);
  const Criterion c =
      info_criterion(data, z, 0.0, DistanceKind::kendall_oc, 2000, 6, 1);
  CHECK(c.value ==
        doctest::Approx(-30.0 * log_factorial(5)).epsilon(1e-9));
  CHECK(c.se == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("data criterion endpoints and a hand count") {
  const Allocation z = alloc({1, 1, 2, 2, 3});
  // fully concordant rows
  std::vector<Permutation> rows(
      6, Permutation::from_order(std::vector<int>{1, 2, 3, 4, 5}));
  CHECK(data_criterion(RankingDataset::of_permutations(rows), z) ==
        doctest::Approx(1.0));
  // full reversal
  std::vector<Permutation> rev(
      6, Permutation::from_order(std::vector<int>{5, 4, 3, 2, 1}));
  CHECK(data_criterion(RankingDataset::of_permutations(rev), z) ==
        doctest::Approx(0.0));
  // one row counted through the between-cluster combinations by hand:
  // pi = (2,3,1,5,4) gives ranks 1:2 2:0 3:1 4:4 5:3; of the 8
  // between-cluster pairs, (1,3) and (4,5) are discordant -> 6/8
  const auto one = RankingDataset::of_permutations(
      {Permutation::from_order(std::vector<int>{2, 3, 1, 5, 4})});
  CHECK(data_criterion(one, z) == doctest::Approx(6.0 / 8.0));

  CHECK_THROWS_AS(data_criterion(one, alloc({1, 1, 1, 1, 1})), error);
}

TEST_CASE("data criterion is invariant under consistent relabeling") {
  rng_t rng = make_rng(201);
  const Allocation z = alloc({1, 2, 2, 3, 1});
  const auto data = simulate(z, 0.9, DistanceKind::hamming_oc, 40, 7);
  const double before = data_criterion(data, z);

  const Permutation relabel = Permutation::uniform(5, rng);
  // map item x -> relabel(x) in both the data and the allocation
  std::vector<Permutation> rows;
  for (int j = 0; j < data.q(); ++j) {
    std::vector<int> order;
    for (int i = 0; i < 5; ++i)
      order.push_back(relabel.item_at(data.rows[std::size_t(j)].slot(i) - 1));
    rows.push_back(Permutation::from_order(order));
  }
  std::vector<int> labels(5);
  for (int item = 1; item <= 5; ++item)
    labels[std::size_t(relabel.item_at(item - 1)) - 1] = z.label_of(item);
  CHECK(data_criterion(RankingDataset::of_permutations(rows), alloc(labels)) ==
        doctest::Approx(before));
}

TEST_CASE("merge tolerance default") {
  CHECK(default_merge_tol(280) == doctest::Approx(0.042).epsilon(1e-2));
  CHECK(default_merge_tol(280) ==
        doctest::Approx(std::sqrt(0.5 / 280.0)).epsilon(1e-12));
}

TEST_CASE("initial structure merges the near-indifferent pair") {
  const auto data = RankingDataset::of_permutations(
      {Permutation::from_order(std::vector<int>{1, 2, 3}),
       Permutation::from_order(std::vector<int>{2, 1, 3})});
  const InitialStructure init =
      initial_structure(preference_matrix(data), 0.1);
  CHECK(init.ct.sizes() == std::vector<int>{2, 1});
  CHECK(init.z.label_of(1) == 1);
  CHECK(init.z.label_of(2) == 1);
  CHECK(init.z.label_of(3) == 2);
}

TEST_CASE("no near-indifferent pair leaves all singletons") {
  std::vector<Permutation> rows(
      8, Permutation::from_order(std::vector<int>{3, 1, 4, 2}));
  const InitialStructure init = initial_structure(
      preference_matrix(RankingDataset::of_permutations(rows)), 0.05);
  CHECK(init.ct.sizes() == std::vector<int>{1, 1, 1, 1});
  // groups ordered by mean rank: 3 first, then 1, 4, 2
  CHECK(init.z.label_of(3) == 1);
  CHECK(init.z.label_of(1) == 2);
  CHECK(init.z.label_of(4) == 3);
  CHECK(init.z.label_of(2) == 4);
}

TEST_CASE("pairs that were never compared do not merge") {
  // two partial rows: items 1 and 3 are never seen together
  std::vector<PartialRanking> rows;
  rows.push_back(PartialRanking::from_slots(std::vector<int>{1, 2, 0}));
  rows.push_back(PartialRanking::from_slots(std::vector<int>{0, 2, 3}));
  rows.push_back(PartialRanking::from_slots(std::vector<int>{1, 2, 0}));
  const auto data = RankingDataset::of(std::move(rows));
  const InitialStructure init =
      initial_structure(preference_matrix(data), 0.2);
  // pbar(1,3) sits at the neutral 0.5 with zero count; merging it would be
  // fabricating indifference
  CHECK(init.z.label_of(1) != init.z.label_of(3));
}

TEST_CASE("neighbors of the documented example") {
  const auto got = neighbor_set(table({1, 3, 3, 3}));
  const std::set<std::vector<int>> want{
      {4, 3, 3},    {2, 2, 3, 3},    {1, 2, 4, 3}, {1, 4, 2, 3},
      {1, 3, 2, 4}, {1, 3, 4, 2},    {1, 3, 3, 2, 1}};
  CHECK(got == want);
}

TEST_CASE("neighbors of degenerate tables") {
  CHECK(neighbor_set(table({5})) ==
        std::set<std::vector<int>>{{4, 1}});
  CHECK(neighbor_set(table({1, 1})) == std::set<std::vector<int>>{{2}});
}

TEST_CASE("neighbor moves preserve the total and positivity") {
  rng_t rng = make_rng(202);
  for (int t = 0; t < 30; ++t) {
    const int L = uniform_int(rng, 1, 5);
    std::vector<int> sizes;
    int total = 0;
    for (int l = 0; l < L; ++l) {
      sizes.push_back(uniform_int(rng, 1, 4));
      total += sizes.back();
    }
    const ClusteringTable ct = table(sizes);
    for (const auto& nb : neighbor_tables(ct)) {
      CHECK(nb.n() == total);
      for (int s : nb.sizes()) CHECK(s >= 1);
      CHECK(nb.sizes() != ct.sizes());
      // length-preserving moves are exactly reversible
      if (nb.num_clusters() == ct.num_clusters()) {
        CHECK(neighbor_set(nb).count(ct.sizes()) == 1);
      }
    }
  }
}

TEST_CASE("greedy search visits each table at most once") {
  const Allocation truth = alloc({1, 1, 2, 2, 3});
  const auto data = simulate(truth, 1.2, DistanceKind::kendall_oc, 80, 8);
  SearchConfig cfg;
  cfg.criterion = CriterionKind::data;
  cfg.seed = 5;
  cfg.threads = 2;
  cfg.mle.anneal.moves_per_temp = 40;
  const SearchResult result =
      greedy_search(data, table({1, 1, 1, 1, 1}), DistanceKind::kendall_oc,
                    cfg);
  std::set<std::vector<int>> seen;
  for (const auto& cand : result.visited) {
    CHECK(seen.count(cand.ct.sizes()) == 0);
    seen.insert(cand.ct.sizes());
  }
  CHECK(result.visited.size() >= 2);
}

TEST_CASE("neighbor filters constrain the search") {
  const Allocation truth = alloc({1, 1, 2, 2, 3});
  const auto data = simulate(truth, 1.0, DistanceKind::hamming_oc, 60, 9);
  SearchConfig cfg;
  cfg.criterion = CriterionKind::data;
  cfg.seed = 6;
  cfg.filter = [](const ClusteringTable& t) {
    return t.num_clusters() == 3;
  };
  const SearchResult result =
      greedy_search(data, table({2, 2, 1}), DistanceKind::hamming_oc, cfg);
  for (const auto& cand : result.visited)
    CHECK(cand.ct.num_clusters() == 3);
}

TEST_CASE("criterion separates the generating distance") {
  // Kendall-generated data: the Kendall fit should dominate the criterion
  const Allocation truth = alloc({1, 2, 2, 3, 3, 3, 3, 4, 4, 5});
  const int reps = 12;
  std::vector<double> ken, ham;
  for (int r = 0; r < reps; ++r) {
    const auto data = simulate(truth, 0.4, DistanceKind::kendall_oc, 200,
                               7000 + std::uint64_t(r));
    MleConfig mcfg;
    mcfg.seed = 800 + std::uint64_t(r);
    mcfg.theta.epsilon = 0.005;
    mcfg.threads = 2;
    const ClusteringTable ct = clustering_table(truth);
    const MleFit fk = fit_mle(data, ct, DistanceKind::kendall_oc, mcfg);
    const MleFit fh = fit_mle(data, ct, DistanceKind::hamming_oc, mcfg);
    ken.push_back(info_criterion(data, fk.z, fk.theta,
                                 DistanceKind::kendall_oc, 20000,
                                 900 + std::uint64_t(r), 2)
                      .value);
    ham.push_back(info_criterion(data, fh.z, fh.theta,
                                 DistanceKind::hamming_oc, 20000,
                                 950 + std::uint64_t(r), 2)
                      .value);
  }
  const double ken_min = *std::min_element(ken.begin(), ken.end());
  const double ham_max = *std::max_element(ham.begin(), ham.end());
  CHECK(ken_min > ham_max);  // no overlap at all at this scale
}

TEST_CASE("structure search lands on or next to the generating table") {
  // the n = 15 protocol with the data criterion, desk scale
  const Allocation truth = alloc({1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5, 5, 5});
  const int reps = 20;
  int close = 0;
  for (int r = 0; r < reps; ++r) {
    const auto data = simulate(truth, 1.5, DistanceKind::kendall_oc, 150,
                               8100 + std::uint64_t(r));
    SearchConfig cfg;
    cfg.criterion = CriterionKind::data;
    cfg.seed = 50 + std::uint64_t(r);
    cfg.threads = 2;
    cfg.mle.anneal.moves_per_temp = 60;
    const InitialStructure init =
        initial_structure(preference_matrix(data), default_merge_tol(150));
    const SearchResult result =
        greedy_search(data, init.ct, DistanceKind::kendall_oc, cfg);
    close += (shift_distance(result.best().ct, clustering_table(truth)) <= 1);
  }
  CHECK(close >= 16);
}

TEST_CASE("strict total consensus ends at or beside all singletons") {
  const Allocation truth = alloc({1, 2, 3, 4, 5, 6});
  const auto data = simulate(truth, 4.0, DistanceKind::kendall_oc, 120, 10);
  SearchConfig cfg;
  cfg.criterion = CriterionKind::data;
  cfg.seed = 7;
  cfg.threads = 2;
  const InitialStructure init =
      initial_structure(preference_matrix(data), default_merge_tol(120));
  const SearchResult result =
      greedy_search(data, init.ct, DistanceKind::kendall_oc, cfg);
  const ClusteringTable singletons = table({1, 1, 1, 1, 1, 1});
  CHECK(shift_distance(result.best().ct, singletons) <= 1);
}

}  // TEST_SUITE
