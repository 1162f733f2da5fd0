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

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bornsim/detection.hpp"
#include "bornsim/optics.hpp"

namespace bornsim {

/// Swept-parameter table: one grid column, named analytic curves and
/// optional Monte Carlo counts, all of the grid's length.
struct ScenarioResult {
  std::string name;
  std::string grid_name;
  std::vector<double> grid;
  std::vector<std::pair<std::string, std::vector<double>>> analytic;
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> counts;
  nlohmann::json meta = nlohmann::json::object();  // alpha, gamma, N, seed, ...
  /// Column order as added: (name, is_count).
  std::vector<std::pair<std::string, bool>> order;

  void add_curve(std::string curve_name, std::vector<double> values);
  void add_counts(std::string curve_name, std::vector<std::int64_t> values);
  const std::vector<double>& curve(const std::string& curve_name) const;
  const std::vector<std::int64_t>& count(const std::string& curve_name) const;
};

/// n evenly spaced points over [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, int n);

inline constexpr int kDefaultGridPoints = 181;

/// Single polarization mode behind a polarizer at angle theta (degrees):
/// alpha = alpha0 cos(theta). Curves "analytic" = N Q_1(2|alpha|, 2g) and
/// "expansion" = N * born_expansion, plus "normalized" (dark counts
/// subtracted, divided by the resulting maximum) and "cos2". Counts "counts"
/// are threshold crossings out of N realizations, one substream per theta.
ScenarioResult polarization_scan(double alpha0, Threshold th, const std::vector<double>& thetas_deg,
                                 std::int64_t n_trials, const RngStream& rng);

/// alpha = cos(theta): the cos^2 baseline ("born"), the normalized detection
/// probability ("model") and the normalized one-or-more-photon probability
/// 1 - exp(-|alpha|^2) ("quantum").
ScenarioResult deviation_scan(Threshold th, const std::vector<double>& thetas_deg);

/// visibility_single versus gamma, one curve per alpha ("alpha=0.5", ...).
ScenarioResult visibility_scan(const std::vector<double>& alphas, const std::vector<double>& gammas);

struct DualModeProbs {
  double p0, ph, pv, phv;
  double ph_conditional;  // P_H / (P_H + P_V)
  double ph_renormalized;
  double visibility;
};

/// H/V polarization pair with alpha cos(theta), alpha sin(theta) (theta in
/// radians). Throws UndefinedConditional when P_H + P_V = 0.
DualModeProbs dual_mode_probs(double alpha, double theta, Threshold th);

/// Curves P0, PH, PV, PHV, pH, pH_renorm and cos2 over theta (degrees).
/// With n_trials > 0, Monte Carlo counts n0, nH, nV, nHV per theta.
ScenarioResult born_again_scan(double alpha, Threshold th, const std::vector<double>& thetas_deg,
                               std::int64_t n_trials = 0, const RngStream& rng = RngStream(0, 0));

struct CoincidenceStats {
  double p0, pr, pd, prd;
  double r;   // P_RD / (P_R P_D)
  double rd;  // P_RD (1 - P_0) / (P_R P_D)
};

/// Coherent state on one input of a 50/50 beam splitter. Throws
/// UndefinedRatio if a single-count probability vanishes.
CoincidenceStats beamsplitter_coincidence(double alpha, Threshold th);

/// Curves P0, PR, PD, PRD, R, Rd over alpha; counts n0, nR, nD, nRD.
ScenarioResult antibunching_scan(const std::vector<double>& alphas, Threshold th,
                                 std::int64_t n_trials = 0, const RngStream& rng = RngStream(0, 0));

struct HyperentangledProbs {
  double pr_rh;  // = Pr[D,V]
  double pr_rv;  // = Pr[D,H]
  double conditional_rh;
};

/// Beam splitter plus CNOT on alpha |R,H>: single-detection probabilities of
/// the four (spatial, polarization) modes.
HyperentangledProbs hyperentangled_probs(double alpha, Threshold th);

/// Curves prRH, prRV, conditional_RH over gamma; counts nRH, nRV, nDH, nDV
/// (outcomes where only that mode clicks).
ScenarioResult hyperentanglement_scan(double alpha, const std::vector<double>& gammas,
                                      std::int64_t n_trials = 0,
                                      const RngStream& rng = RngStream(0, 0));

/// Conditional probability of |R,H> given one click among the two output
/// modes of the Mach-Zehnder interferometer with phase phi.
double mach_zehnder_conditional(double alpha, double phi, Threshold th);
/// Pr[at least one click] with (P_MZ) and without (P_DC) the final splitter.
double mach_zehnder_any_click(double alpha, double phi, Threshold th);
double delayed_choice_any_click(double alpha, double phi, Threshold th);

/// Curves over phi: "p_mz", "cos2", "p_dc" (delayed choice, 1/2), "P_MZ",
/// "P_DC", "ratio" (P_MZ / P_DC) and "which_way" (each of the four marked
/// modes, 1/4). The delayed-choice and which-way curves are evaluated from
/// the circuits themselves.
/// Counts n0, nR, nD, nRD for the full interferometer when n_trials > 0.
ScenarioResult mach_zehnder(double alpha, Threshold th, const std::vector<double>& phis,
                            std::int64_t n_trials = 0, const RngStream& rng = RngStream(0, 0));

/// The experimentalist's reduction of noisy Mach-Zehnder data:
///  1. samples s_j = p_mz(phi_j) + N(0, sample_sd^2) on n_points phases
///     evenly spaced over [0, 2 pi];
///  2. subtract the dark-count probability e^{-2 g^2};
///  3. least-squares fit A cos^2(phi/2 + phi0) + B (period fixed to 2 pi);
///  4. visibility = (max - min)/(max + min) of the dark-subtracted
///     probabilities at the fitted fringe maximum and minimum;
///  5. rmse of the raw samples against the ideal cos^2(phi/2);
///  6. rd = anticorrelation R_d of the open interferometer (first beam
///     splitter only), where the which-path detectors sit.
struct MachZehnderFit {
  std::vector<double> phis;
  std::vector<double> samples;
  std::vector<double> fitted;
  double amplitude = 0.0;
  double offset = 0.0;
  double phase = 0.0;
  double cosine_visibility = 0.0;  // A / (A + 2B) of the fitted cosine
  double visibility = 0.0;
  double rd = 0.0;
  double rmse = 0.0;
};

/// Photons behind each fitted sample; the sample noise is 1/sqrt of this.
inline constexpr double kPhotonsPerSample = 2600.0;

MachZehnderFit mach_zehnder_fit(double alpha, Threshold th, int n_points, double sample_sd,
                                const RngStream& rng);

/// p_i = r_i / sum_k r_k with r_i = q_i / (1 - q_i): probability that mode i
/// is the one that clicked, given exactly one click. Throws
/// SaturatedDetector when some q_k = 1.
std::vector<double> conditional_mode_probs(const CoherentVector& state, Threshold th);

}  // namespace bornsim
