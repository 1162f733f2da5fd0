// Copyright 2026 The bornsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bornsim/marcum.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bornsim/error.hpp"

namespace bornsim {

namespace {

constexpr double kTailFraction = 1e-17;
constexpr int kMaxTerms = 10'000'000;

double log_add(double la, double lb) {
  if (la == -INFINITY) return lb;
  if (lb == -INFINITY) return la;
  const double hi = std::max(la, lb);
  return hi + std::log1p(std::exp(std::min(la, lb) - hi));
}

// sum_k Pois(k; x) Q(k+1, y), where Q(k+1, y) = sum_{j<=k} Pois(j; y).
double upper_series(double x, double y) {
  const double log_x = std::log(x);
  const double log_y = std::log(y);
  double log_w = -x;   // log Pois(k; x)
  double log_py = -y;  // log Pois(k; y)
  double log_q = -y;   // log Q(k+1, y)
  double sum = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double term = std::exp(log_w + log_q);
    sum += term;
    const double kp1 = k + 1.0;
    const double rho = x / kp1 * (1.0 + y / kp1);
    if (rho < 1.0 && term * rho / (1.0 - rho) <= kTailFraction * sum) break;
    log_w += log_x - std::log(kp1);
    log_py += log_y - std::log(kp1);
    log_q = log_add(log_q, log_py);
  }
  return sum;
}

// log P(a, y) for integer a > y: e^{-y} y^a / a! * sum_n y^n / ((a+1)...(a+n)).
double log_lower_gamma_tail(double a, double y) {
  double term = 1.0;
  double s = 1.0;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= y / (a + n);
    s += term;
    if (term < 1e-18 * s) break;
  }
  return -y + a * std::log(y) - std::lgamma(a + 1.0) + std::log(s);
}

// sum_{k=0}^{K} Pois(k; x) P(k+1, y), summed from k = K downward so that
// P(k+1, y) = P(k+2, y) + Pois(k+1; y) only ever adds positive terms. K is
// doubled until the tail bound holds. Requires x >= y.
double lower_series(double x, double y) {
  const double log_x = std::log(x);
  const double log_y = std::log(y);
  int big_k = static_cast<int>(std::ceil(x + 10.0 * std::sqrt(x) + 20.0));
  std::vector<double> log_w;
  while (true) {
    log_w.resize(big_k + 1);
    log_w[0] = -x;
    for (int k = 1; k <= big_k; ++k) log_w[k] = log_w[k - 1] + log_x - std::log(double(k));

    double log_p = log_lower_gamma_tail(big_k + 1.0, y);  // log P(K+1, y)
    double log_py = -y + (big_k + 1.0) * log_y - std::lgamma(big_k + 2.0);  // log Pois(K+1; y)
    double sum = 0.0;
    double last_term = 0.0;
    for (int k = big_k; k >= 0; --k) {
      const double term = std::exp(log_w[k] + log_p);
      if (k == big_k) last_term = term;
      sum += term;
      // Step to P(k, y) = P(k+1, y) + Pois(k; y).
      log_py += std::log((k + 1.0) / y);
      log_p = log_add(log_p, log_py);
    }
    const double rho = x / (big_k + 1.0);
    if (rho < 1.0 && last_term * rho / (1.0 - rho) <= kTailFraction * sum) return sum;
    if (sum == 0.0 && rho < 0.5) return 0.0;
    if (big_k > kMaxTerms / 2) return sum;
    big_k *= 2;
  }
}

}  // namespace

MarcumPair marcum_q1_pair(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
    throw DomainError("marcum_q1 needs finite nonnegative arguments");
  }
  if (b == 0.0) return {1.0, 0.0};
  const double y = 0.5 * b * b;
  if (a == 0.0) return {std::exp(-y), -std::expm1(-y)};
  const double x = 0.5 * a * a;
  if (a < b) {
    const double q = std::clamp(upper_series(x, y), 0.0, 1.0);
    return {q, 1.0 - q};
  }
  const double c = std::clamp(lower_series(x, y), 0.0, 1.0);
  return {1.0 - c, c};
}

double marcum_q1(double a, double b) { return marcum_q1_pair(a, b).q; }

double marcum_q1_complement(double a, double b) { return marcum_q1_pair(a, b).one_minus_q; }

}  // namespace bornsim
