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

#include <cmath>
#include <span>
#include <vector>

namespace cmm {

inline double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

// log of the multinomial coefficient n! / (sizes[0]! * ... * sizes[L-1]!)
double log_multinomial_coef(int n, std::span<const int> sizes);

// max-shifted log(sum(exp(x_i))); -inf for an empty input
double log_sum_exp(std::span<const double> x);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased, needs size >= 2

// Linear-interpolation quantile of an unsorted sample, p in [0,1].
double quantile(std::vector<double> x, double p);

// Regularized lower incomplete gamma P(a, x); series/continued-fraction
// split at x = a + 1.
double reg_lower_gamma(double a, double x);

// CDF of Gamma(shape, rate) at x.
inline double gamma_cdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return reg_lower_gamma(shape, rate * x);
}

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return 1.0 - reg_lower_gamma(0.5 * df, 0.5 * x);
}

// Mode located by a histogram with Freedman-Diaconis bin widths; returns
// the center of the most populated bin.
double fd_histogram_mode(std::vector<double> x);

}  // namespace cmm
