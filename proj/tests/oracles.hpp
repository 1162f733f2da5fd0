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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "bornsim/field.hpp"
#include "bornsim/rng.hpp"

namespace oracle {

// Q_1(a, b) from its defining integral. Tail form int_b^inf for a < b,
// complement int_0^b otherwise, so the integrated quantity is the smaller
// of the pair. The Bessel factor is written as exp(-(x - a)^2 / 2) times
// the exponentially scaled I_0 to keep the integrand finite.
inline double marcum_integrand(double a, double x) {
  if (a * x > 600.0) {
    // I_0(z) e^{-z}, asymptotic series; ample for z > 600.
    const double z = a * x;
    const double s = 1.0 + 1.0 / (8.0 * z) + 9.0 / (128.0 * z * z) + 225.0 / (3072.0 * z * z * z);
    return x * std::exp(-(x - a) * (x - a) / 2.0) * s / std::sqrt(2.0 * M_PI * z);
  }
  return x * std::exp(-(x * x + a * a) / 2.0) * boost::math::cyl_bessel_i(0, a * x);
}

inline double marcum_tail_quadrature(double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [a](double x) { return marcum_integrand(a, x); };
  double err = 0.0;
  // Split at the peak so the adaptive rule sees it.
  const double peak = std::max(a, b);
  double s = 0.0;
  if (peak > b) s += gauss_kronrod<double, 61>::integrate(f, b, peak, 12, 1e-13, &err);
  s += gauss_kronrod<double, 61>::integrate(f, peak, peak + 12.0, 12, 1e-13, &err);
  s += gauss_kronrod<double, 61>::integrate(f, peak + 12.0, std::numeric_limits<double>::infinity(), 12,
                                            1e-13, &err);
  return s;
}

inline double marcum_head_quadrature(double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  if (b == 0.0) return 0.0;
  auto f = [a](double x) { return marcum_integrand(a, x); };
  double err = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, 0.0, b, 12, 1e-13, &err);
}

/// {Q_1, 1 - Q_1} from quadrature.
inline std::pair<double, double> marcum_quadrature(double a, double b) {
  if (a < b) {
    const double q = marcum_tail_quadrature(a, b);
    return {q, 1.0 - q};
  }
  const double c = marcum_head_quadrature(a, b);
  return {1.0 - c, c};
}

/// 1 - Q_1(2|alpha|, 2 gamma) as the CDF at 4 gamma^2 of a noncentral
/// chi-squared with 2 degrees of freedom and noncentrality 4|alpha|^2.
inline double ncx2_cdf(double alpha_abs, double gamma) {
  if (alpha_abs == 0.0) return -std::expm1(-2.0 * gamma * gamma);
  boost::math::non_central_chi_squared_distribution<double> dist(2.0, 4.0 * alpha_abs * alpha_abs);
  return boost::math::cdf(dist, 4.0 * gamma * gamma);
}

/// Euclidean projection of v onto the probability simplex.
inline Eigen::VectorXd simplex_projection(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

/// Closest density matrix to a Hermitian matrix A in Frobenius norm:
/// same eigenvectors, eigenvalues projected onto the simplex.
inline bornsim::CMatrix nearest_density_matrix(const bornsim::CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<bornsim::CMatrix> es(0.5 * (a + a.adjoint()));
  const Eigen::VectorXd lam = simplex_projection(es.eigenvalues());
  return es.eigenvectors() * lam.cast<bornsim::Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Random density matrix of the given rank: G G^dagger / Tr with G a
/// d x rank complex Gaussian matrix.
inline bornsim::CMatrix random_density(int d, int rank, bornsim::RngStream& rng) {
  bornsim::CMatrix g(d, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = rng.standard_complex();
  }
  bornsim::CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline bornsim::CVector random_direction(int d, bornsim::RngStream& rng) {
  bornsim::CVector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.standard_complex();
  return v / v.norm();
}

/// Standard error of a binomial frequency.
inline double binomial_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

/// Click probabilities for every outcome, from the product rule, written
/// independently of the library's table construction.
inline std::vector<double> product_table(const std::vector<double>& q) {
  const std::size_t d = q.size();
  std::vector<double> t(std::size_t{1} << d);
  for (std::size_t k = 0; k < t.size(); ++k) {
    double p = 1.0;
    for (std::size_t i = 0; i < d; ++i) p *= ((k >> i) & 1U) ? q[i] : 1.0 - q[i];
    t[k] = p;
  }
  return t;
}

}  // namespace oracle
