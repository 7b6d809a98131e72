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
#include <vector>

#include "cmm/math_util.hpp"

using namespace cmm;

TEST_SUITE("math") {

TEST_CASE("log_sum_exp matches direct evaluation and survives shifts") {
  std::vector<double> x{0.0, 1.0, 2.0};
  const double direct = std::log(1.0 + std::exp(1.0) + std::exp(2.0));
  CHECK(log_sum_exp(x) == doctest::Approx(direct).epsilon(1e-14));
  std::vector<double> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("multinomial coefficient") {
  const std::vector<int> sizes{2, 2};
  CHECK(log_multinomial_coef(4, sizes) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));
  const std::vector<int> one{5};
  CHECK(log_multinomial_coef(5, one) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("regularized incomplete gamma against the Erlang closed form") {
  // shape 2, rate 2: cdf(x) = 1 - exp(-2x)(1 + 2x)
  for (double x : {0.1, 0.3, 0.839, 1.5, 3.0, 8.0}) {
    const double expected = 1.0 - std::exp(-2.0 * x) * (1.0 + 2.0 * x);
    CHECK(gamma_cdf(x, 2.0, 2.0) == doctest::Approx(expected).epsilon(1e-10));
  }
  // chi-square upper tail at the familiar 95% point
  CHECK(chi_square_sf(3.841, 1.0) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_sf(0.0, 4.0) == doctest::Approx(1.0));
}

TEST_CASE("quantile interpolates") {
  std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(x, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(x, 1.0) == doctest::Approx(4.0));
  CHECK(quantile(x, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("variance and mean") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(x) == doctest::Approx(2.5));
  CHECK(variance(x) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("histogram mode lands in the heavy bin") {
  std::vector<double> x;
  for (int i = 0; i < 300; ++i) x.push_back(1.0 + 0.001 * (i % 10));
  for (int i = 0; i < 40; ++i) x.push_back(5.0 + 0.01 * i);
  const double mode = fd_histogram_mode(x);
  CHECK(mode > 0.5);
  CHECK(mode < 1.6);
}

}  // TEST_SUITE
