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

// Every experiment's closed forms checked against brute-force sums over the
// full outcome table of the state built from generic gates, and against
// Monte Carlo histograms.

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bornsim/experiments.hpp"
#include "bornsim/optics.hpp"
#include "oracles.hpp"

using namespace bornsim;

namespace {

constexpr std::int64_t kTrials = 100000;
constexpr double kExact = 1e-12;

UnitaryMatrix id2() { return UnitaryMatrix::identity(2); }

// Brute-force table, cross-checked entry by entry against the oracle's
// product rule before use.
std::vector<double> table(const CoherentVector& state, Threshold th) {
  const auto q = mode_crossing_probs(state, th);
  const auto lib = outcome_distribution(state, th);
  const auto ref = oracle::product_table(q);
  double total = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    EXPECT_NEAR(lib.probs()[k], ref[k], 1e-15);
    total += lib.probs()[k];
  }
  EXPECT_NEAR(total, 1.0, kExact);
  return lib.probs();
}

double singles(const std::vector<double>& t) {
  double s = 0.0;
  for (std::size_t b = 1; b < t.size(); b <<= 1) s += t[b];
  return s;
}

void expect_counts(std::int64_t count, double p, std::int64_t n, const std::string& what) {
  const double sd = std::sqrt(n * p * (1.0 - p));
  EXPECT_LE(std::abs(count - n * p), 5.0 * sd + 1e-9) << what << " p=" << p;
}

}  // namespace

TEST(CrossOracle, Polarization) {
  const Threshold th(1.0);
  const auto thetas = linspace(0.0, 180.0, 19);
  const auto r = polarization_scan(0.707, th, thetas, kTrials, RngStream(101, 0));
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    // A polarizer at theta: the analyzer's pass port is mode 0 of a rotation.
    const double t = thetas[i] * std::numbers::pi / 180.0;
    CMatrix rot(2, 2);
    rot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    const auto out = apply(UnitaryMatrix(rot), CoherentVector::basis(0.707, 2, 0));
    const auto tab = table(out, th);
    const double pass = tab[1] + tab[3];
    EXPECT_NEAR(r.curve("analytic")[i] / kTrials, pass, kExact) << thetas[i];
    expect_counts(r.count("counts")[i], pass, kTrials, "counts");
  }
}

TEST(CrossOracle, DualMode) {
  const Threshold th(1.0);
  const double alpha = std::sqrt(0.5);
  const auto thetas = linspace(0.0, 180.0, 13);
  const auto r = born_again_scan(alpha, th, thetas, kTrials, RngStream(102, 0));
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double t = thetas[i] * std::numbers::pi / 180.0;
    CMatrix rot(2, 2);
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const auto tab = table(apply(UnitaryMatrix(rot), CoherentVector::basis(alpha, 2)), th);
    const auto p = dual_mode_probs(alpha, t, th);
    EXPECT_NEAR(p.p0, tab[0], kExact);
    EXPECT_NEAR(p.ph, tab[1], kExact);
    EXPECT_NEAR(p.pv, tab[2], kExact);
    EXPECT_NEAR(p.phv, tab[3], kExact);
    EXPECT_NEAR(p.ph_conditional, tab[1] / singles(tab), kExact);
    const char* names[] = {"n0", "nH", "nV", "nHV"};
    for (int k = 0; k < 4; ++k) expect_counts(r.count(names[k])[i], tab[k], kTrials, names[k]);
  }
}

TEST(CrossOracle, VisibilityFromSingleModeTables) {
  for (double g : {0.6, 1.0, 1.6}) {
    const Threshold th(g);
    for (double a : {0.2, 0.7, 1.5}) {
      // Bright arm with alpha, dark arm with vacuum.
      const auto tab = table(CoherentVector::basis(a, 2), th);
      const double v = (tab[1] - tab[2]) / (tab[1] + tab[2]);
      EXPECT_NEAR(dual_mode_probs(a, 0.0, th).visibility, v, kExact);
    }
  }
}

TEST(CrossOracle, BeamSplitter) {
  const auto alphas = linspace(0.1, 3.0, 12);
  for (double g : {0.5, 1.0, 1.6}) {
    const Threshold th(g);
    const auto r = antibunching_scan(alphas, th, kTrials, RngStream(103, static_cast<std::uint64_t>(g * 10)));
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const auto tab = table(apply(gate_hadamard(), CoherentVector::basis(alphas[i], 2)), th);
      const auto s = beamsplitter_coincidence(alphas[i], th);
      EXPECT_NEAR(s.p0, tab[0], kExact);
      EXPECT_NEAR(s.pr, tab[1], kExact);
      EXPECT_NEAR(s.pd, tab[2], kExact);
      EXPECT_NEAR(s.prd, tab[3], kExact);
      const double rd = tab[3] * (1.0 - tab[0]) / (tab[1] * tab[2]);
      EXPECT_NEAR(s.rd / rd, 1.0, kExact);
      const char* names[] = {"n0", "nR", "nD", "nRD"};
      for (int k = 0; k < 4; ++k) expect_counts(r.count(names[k])[i], tab[k], kTrials, names[k]);
    }
  }
}

TEST(CrossOracle, Hyperentanglement) {
  const UnitaryMatrix u = gate_cnot() * kron(gate_hadamard(), id2());
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    const auto gammas = linspace(0.3, 3.0, 10);
    const auto r = hyperentanglement_scan(alpha, gammas, kTrials, RngStream(104, static_cast<std::uint64_t>(alpha * 10)));
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      const Threshold th(gammas[i]);
      const auto tab = table(apply(u, CoherentVector::basis(alpha, 4)), th);
      const auto p = hyperentangled_probs(alpha, th);
      EXPECT_NEAR(p.pr_rh, tab[1], kExact);
      EXPECT_NEAR(p.pr_rv, tab[2], kExact);
      EXPECT_NEAR(p.conditional_rh, tab[1] / singles(tab), kExact);
      const char* names[] = {"nRH", "nRV", "nDH", "nDV"};
      for (int k = 0; k < 4; ++k) {
        expect_counts(r.count(names[k])[i], tab[std::size_t{1} << k], kTrials, names[k]);
      }
    }
  }
}

TEST(CrossOracle, MachZehnderFamily) {
  const Threshold th(1.2);
  const double alpha = 0.95;
  const auto phis = linspace(0.0, 2.0 * std::numbers::pi, 25);
  const auto r = mach_zehnder(alpha, th, phis, kTrials, RngStream(105, 0));
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const double phi = phis[i];
    const UnitaryMatrix arm = gate_phase(phi) * gate_hadamard();
    const auto mz = table(apply(gate_hadamard() * arm, CoherentVector::basis(alpha, 2)), th);
    const auto dc = table(apply(arm, CoherentVector::basis(alpha, 2)), th);
    const UnitaryMatrix ww_u = kron(gate_hadamard(), id2()) * gate_cnot() * kron(arm, id2());
    const auto ww = table(apply(ww_u, CoherentVector::basis(alpha, 4)), th);

    EXPECT_NEAR(mach_zehnder_conditional(alpha, phi, th), mz[1] / singles(mz), kExact) << phi;
    EXPECT_NEAR(mach_zehnder_any_click(alpha, phi, th), 1.0 - mz[0], kExact);
    EXPECT_NEAR(delayed_choice_any_click(alpha, phi, th), 1.0 - dc[0], kExact);
    EXPECT_NEAR(r.curve("p_dc")[i], dc[1] / singles(dc), kExact);
    EXPECT_NEAR(r.curve("which_way")[i], ww[1] / singles(ww), kExact);
    const char* names[] = {"n0", "nR", "nD", "nRD"};
    for (int k = 0; k < 4; ++k) expect_counts(r.count(names[k])[i], mz[k], kTrials, names[k]);
  }
}

TEST(CrossOracle, GeneralConditionalLaw) {
  RngStream rng(106, 0);
  for (int d : {2, 3, 5, 8}) {
    for (int rep = 0; rep < 3; ++rep) {
      const UnitaryMatrix u = haar_unitary(d, rng);
      const CoherentVector in = CoherentVector::basis(0.4 + 0.6 * rep, d);
      const Threshold th(0.8 + 0.3 * rep);
      const CoherentVector out = apply(u, in);
      const auto tab = table(out, th);
      const auto p = conditional_mode_probs(out, th);
      const double s = singles(tab);
      for (int i = 0; i < d; ++i) EXPECT_NEAR(p[i], tab[std::size_t{1} << i] / s, kExact);

      for (NoiseMode mode : {NoiseMode::kFresh, NoiseMode::kPropagated}) {
        const auto counts = simulate_outcomes(in, u, th, kTrials, rng.substream(d * 10 + rep), mode);
        for (std::size_t k = 0; k < tab.size(); ++k) {
          expect_counts(static_cast<std::int64_t>(counts[k]), tab[k], kTrials, "outcome " + std::to_string(k));
        }
      }
    }
  }
}
