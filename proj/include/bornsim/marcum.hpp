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

#pragma once

namespace bornsim {

/// Q_1(a, b) together with its complement 1 - Q_1(a, b), each to full
/// relative precision. Bright modes need the complement separately: at
/// a = 20, b = 2 it is near 1e-70 while Q_1 rounds to exactly 1.
struct MarcumPair {
  double q;
  double one_minus_q;
};

/// Marcum Q-function Q_1(a, b) = int_b^inf x exp(-(x^2 + a^2)/2) I_0(a x) dx.
///
/// Evaluated as a Poisson mixture of regularized incomplete gamma functions,
/// with x = a^2/2 and y = b^2/2:
///
///   Q_1(a, b)     = sum_k Pois(k; x) Q(k + 1, y)          (used when a < b)
///   1 - Q_1(a, b) = sum_k Pois(k; x) P(k + 1, y)          (used when a >= b)
///
/// All terms are nonnegative and the branch always sums the smaller of the
/// pair, so both values keep full relative accuracy. Truncation: past the
/// peak, successive term ratios are bounded by rho_k = x/(k+1) (1 + y/(k+1))
/// in the first branch and x/(k+1) in the second, so the discarded tail
/// after term t_K is at most t_K rho_K / (1 - rho_K) once rho_K < 1; the sum
/// stops when that bound is below 1e-17 of the total. Weights are carried in
/// log space so large arguments do not underflow the leading terms. The
/// regularized gamma values come from upward accumulation of Poisson terms
/// (first branch) or downward accumulation from a tail series (second), both
/// of which add only positive quantities. Round-off grows like k * eps,
/// about 1e-13 relative at a = 40.
///
/// Throws DomainError for negative or non-finite arguments.
MarcumPair marcum_q1_pair(double a, double b);

double marcum_q1(double a, double b);

/// 1 - Q_1(a, b) without cancellation.
double marcum_q1_complement(double a, double b);

}  // namespace bornsim
