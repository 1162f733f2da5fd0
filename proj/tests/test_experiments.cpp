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

#include "bornsim/experiments.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bornsim/error.hpp"
#include "oracles.hpp"

using namespace bornsim;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> theta_grid() { return linspace(0.0, 180.0, kDefaultGridPoints); }

}  // namespace

TEST(Linspace, EndpointsAndErrors) {
  const auto v = linspace(0.0, 180.0, 181);
  EXPECT_EQ(v.size(), 181u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_EQ(v.back(), 180.0);
  EXPECT_DOUBLE_EQ(v[90], 90.0);
  EXPECT_EQ(linspace(2.0, 5.0, 1), std::vector<double>{2.0});
  EXPECT_THROW(linspace(0.0, 1.0, 0), InvalidDimension);
}

TEST(PolarizationScan, CountEndpoints) {
  const auto r = polarization_scan(0.707, Threshold(1.0), theta_grid(), 10000, RngStream(42, 0));
  const auto& a = r.curve("analytic");
  ASSERT_EQ(a.size(), 181u);
  EXPECT_NEAR(a[90], 1353.35, 0.01);
  EXPECT_NEAR(a[0], 3942.2, 0.1);
  EXPECT_EQ(r.count("counts").size(), 181u);
  EXPECT_EQ(r.meta["N"], 10000);
  EXPECT_DOUBLE_EQ(r.curve("normalized")[0], 1.0);
  EXPECT_NEAR(r.curve("normalized")[90], 0.0, 1e-12);
  EXPECT_THROW(polarization_scan(0.707, Threshold(1.0), theta_grid(), 0, RngStream(1, 0)), DomainError);
}

TEST(PolarizationScan, CountsWithinBinomialSpread) {
  const std::int64_t n = 10000;
  const auto r = polarization_scan(0.707, Threshold(1.0), theta_grid(), n, RngStream(42, 0));
  const auto& a = r.curve("analytic");
  const auto& c = r.count("counts");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = a[i] / n;
    EXPECT_LT(std::abs(c[i] - a[i]), 5.0 * std::sqrt(n * p * (1 - p))) << r.grid[i];
  }
}

TEST(PolarizationScan, ExpansionTracksAtSmallAmplitude) {
  const auto r = polarization_scan(0.2, Threshold(1.0), theta_grid(), 1, RngStream(1, 0));
  const auto& a = r.curve("analytic");
  const auto& e = r.curve("expansion");
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], e[i], 1e-4);
}

TEST(Deviation, EndpointsAndOrdering) {
  const auto r = deviation_scan(Threshold(1.0), theta_grid());
  EXPECT_DOUBLE_EQ(r.curve("model")[0], 1.0);
  EXPECT_NEAR(r.curve("model")[90], 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.curve("born")[0], 1.0);
}

TEST(VisibilityScan, CurveOrdering) {
  const auto r = visibility_scan({0.5, 1.0, 1.5}, linspace(0.1, 3.0, 30));
  const auto& lo = r.curve("alpha=0.5");
  const auto& hi = r.curve("alpha=1.5");
  for (std::size_t i = 0; i < lo.size(); ++i) EXPECT_GE(hi[i], lo[i]);
}

TEST(DualMode, BalancedAtFortyFive) {
  const auto p = dual_mode_probs(0.9, kPi / 4.0, Threshold(1.0));
  EXPECT_NEAR(p.ph_conditional, 0.5, 1e-15);
  EXPECT_NEAR(p.p0 + p.ph + p.pv + p.phv, 1.0, 1e-12);
}

TEST(DualMode, QuotedVisibilityAndRange) {
  const double alpha = std::sqrt(0.5);
  const Threshold th(1.0);
  const auto p0 = dual_mode_probs(alpha, 0.0, th);
  EXPECT_NEAR(p0.visibility, 0.61, 0.005);
  double lo = 1.0, hi = 0.0;
  for (double t : theta_grid()) {
    const auto p = dual_mode_probs(alpha, t * kPi / 180.0, th);
    lo = std::min(lo, p.ph_conditional);
    hi = std::max(hi, p.ph_conditional);
    EXPECT_NEAR(p.p0 + p.ph + p.pv + p.phv, 1.0, 1e-12);
  }
  EXPECT_NEAR(lo, 0.19, 0.005);
  EXPECT_NEAR(hi, 0.81, 0.005);
}

TEST(DualMode, RenormalizedEndpoints) {
  const double alpha = std::sqrt(0.5);
  const Threshold th(1.0);
  EXPECT_NEAR(dual_mode_probs(alpha, 0.0, th).ph_renormalized, 1.0, 1e-9);
  EXPECT_NEAR(dual_mode_probs(alpha, kPi / 4.0, th).ph_renormalized, 0.5, 1e-9);
  EXPECT_NEAR(dual_mode_probs(alpha, kPi / 2.0, th).ph_renormalized, 0.0, 1e-9);
}

TEST(DualMode, UndefinedWhenNoSingles) {
  // gamma = 0: every mode always clicks, so P_H = P_V = 0.
  EXPECT_THROW(dual_mode_probs(1.0, 0.3, Threshold(0.0)), UndefinedConditional);
}

TEST(BeamSplitter, RatioBoundOnGrid) {
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double alpha = 0.1 + 0.15 * i;
      const double gamma = 0.1 + 0.12 * j;
      EXPECT_GE(beamsplitter_coincidence(alpha, Threshold(gamma)).r, 1.0 - 1e-12);
    }
  }
}

TEST(BeamSplitter, AnticorrelationValues) {
  const auto grid = linspace(0.0, 3.0, 301);
  const auto r = antibunching_scan(grid, Threshold(1.0));
  const auto& rd = r.curve("Rd");
  EXPECT_NEAR(*std::min_element(rd.begin(), rd.end()), 0.34, 0.01);
  EXPECT_NEAR(beamsplitter_coincidence(0.3, Threshold(1.6)).rd, 0.018, 0.002);
  EXPECT_THROW(beamsplitter_coincidence(1.0, Threshold(0.0)), UndefinedRatio);
}

TEST(Hyperentangled, Limits) {
  for (double g : {0.3, 1.0, 2.0, 3.5}) {
    EXPECT_EQ(hyperentangled_probs(0.0, Threshold(g)).conditional_rh, 0.25);
  }
  const double c = hyperentangled_probs(1.0, Threshold(3.0)).conditional_rh;
  EXPECT_GE(c, 0.49);
  EXPECT_LE(c, 0.51);
}

TEST(MachZehnder, SymmetryAndQuarterWave) {
  const Threshold th(1.0);
  for (double alpha : {0.3, 1.0, 2.0}) {
    EXPECT_EQ(mach_zehnder_conditional(alpha, kPi / 2.0, th), 0.5);
    for (double phi : linspace(0.0, 2.0 * kPi, 37)) {
      EXPECT_NEAR(mach_zehnder_conditional(alpha, phi, th) + mach_zehnder_conditional(alpha, phi + kPi, th), 1.0,
                  1e-12);
    }
  }
}

TEST(MachZehnder, ScenarioCurves) {
  const auto r = mach_zehnder(0.95, Threshold(1.6), linspace(0.0, 2.0 * kPi, 181));
  for (double v : r.curve("p_dc")) EXPECT_NEAR(v, 0.5, 1e-12);
  for (double v : r.curve("which_way")) EXPECT_NEAR(v, 0.25, 1e-12);
  const auto& ratio = r.curve("ratio");
  const auto& pmz = r.curve("P_MZ");
  const auto& pdc = r.curve("P_DC");
  for (std::size_t i = 0; i < ratio.size(); ++i) EXPECT_DOUBLE_EQ(ratio[i], pmz[i] / pdc[i]);
}

TEST(MachZehnder, TotalCountsConvergeForDimLight) {
  const Threshold th(1.0);
  for (double phi : linspace(0.0, 2.0 * kPi, 13)) {
    EXPECT_NEAR(mach_zehnder_any_click(1e-3, phi, th) / delayed_choice_any_click(1e-3, phi, th), 1.0, 1e-4);
  }
}

TEST(MachZehnder, FittedSampleAnalysis) {
  const auto f = mach_zehnder_fit(0.95, Threshold(1.6), 181, 1.0 / std::sqrt(kPhotonsPerSample),
                                  RngStream(42, 1));
  EXPECT_NEAR(f.visibility, 0.94, 0.02);
  EXPECT_NEAR(f.rd, 0.12, 0.02);
  EXPECT_NEAR(f.rmse, 0.04, 0.02);
  EXPECT_EQ(f.fitted.size(), 181u);
  // Fringe maximum sits at phi = 0.
  EXPECT_LT(std::abs(f.phase), 0.05);
}

TEST(MachZehnder, FitRecoversNoiselessCosine) {
  // With zero noise the fit must reproduce the least-squares projection of
  // the exact curve; the fitted phase is then exactly zero by symmetry.
  const auto f = mach_zehnder_fit(0.95, Threshold(1.6), 61, 0.0, RngStream(1, 1));
  EXPECT_NEAR(f.phase, 0.0, 1e-12);
  EXPECT_NEAR(f.visibility, 0.9382, 1e-4);
  EXPECT_THROW(mach_zehnder_fit(0.95, Threshold(1.6), 2, 0.0, RngStream(1, 1)), InvalidDimension);
}

TEST(ConditionalModes, VacuumIsUniform) {
  RngStream rng(5, 0);
  for (int d : {2, 3, 4, 7}) {
    const auto p = conditional_mode_probs(CoherentVector(0.0, oracle::random_direction(d, rng)), Threshold(1.0));
    for (double v : p) EXPECT_NEAR(v, 1.0 / d, 1e-15);
  }
}

TEST(ConditionalModes, ClassicalLimitAndSymmetry) {
  const auto p = conditional_mode_probs(CoherentVector::basis(10.0, 4), Threshold(1.0));
  EXPECT_GT(p[0], 0.999);
  const auto u = conditional_mode_probs(CoherentVector::normalized(2.3, CVector::Ones(5)), Threshold(0.7));
  for (double v : u) EXPECT_EQ(v, u[0]);
  double sum = 0.0;
  for (double v : u) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(ConditionalModes, SaturatedDetector) {
  EXPECT_THROW(conditional_mode_probs(CoherentVector::basis(1.0, 2), Threshold(0.0)), SaturatedDetector);
}

TEST(ScenarioResult, RejectsMismatchedCurves) {
  ScenarioResult r;
  r.grid = {1.0, 2.0};
  EXPECT_THROW(r.add_curve("x", {1.0}), DimensionMismatch);
  EXPECT_THROW(r.curve("missing"), DomainError);
}
