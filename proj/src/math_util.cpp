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

#include "cmm/math_util.hpp"

#include <algorithm>
#include <limits>

namespace cmm {

double log_multinomial_coef(int n, std::span<const int> sizes) {
  double v = log_factorial(n);
  for (int s : sizes) v -= log_factorial(s);
  return v;
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  double m = x[0];
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / double(x.size());
}

double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / double(x.size() - 1);
}

double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  if (x.size() == 1) return x[0];
  const double pos = p * double(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = pos - double(lo);
  return x[lo] * (1.0 - frac) + x[hi] * frac;
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double reg_lower_gamma(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double fd_histogram_mode(std::vector<double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (x.size() < 4) return mean(x);
  std::sort(x.begin(), x.end());
  const double q1 = quantile(x, 0.25);
  const double q3 = quantile(x, 0.75);
  const double iqr = q3 - q1;
  const double lo = x.front(), hi = x.back();
  double width = 2.0 * iqr / std::cbrt(double(x.size()));
  if (width <= 0.0) return x[x.size() / 2];
  const int bins = std::max(1, int((hi - lo) / width) + 1);
  std::vector<int> count(bins, 0);
  for (double v : x) {
    int b = std::min(bins - 1, int((v - lo) / width));
    ++count[b];
  }
  int best = 0;
  for (int b = 1; b < bins; ++b)
    if (count[b] > count[best]) best = b;
  return lo + (double(best) + 0.5) * width;
}

}  // namespace cmm
