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
#include <vector>

#include "bornsim/field.hpp"
#include "bornsim/marcum.hpp"
#include "bornsim/optics.hpp"

namespace bornsim {

/// Dimensionless detection threshold gamma in the single-mode limit: a mode
/// clicks when its amplitude satisfies |a| > gamma.
class Threshold {
 public:
  explicit Threshold(double gamma);
  double gamma() const { return gamma_; }

 private:
  double gamma_;
};

/// Click pattern (n_1, ..., n_d). Mode i maps to bit i of index().
struct DetectionOutcome {
  std::vector<std::uint8_t> bits;

  static DetectionOutcome from_index(std::uint64_t index, int d);
  std::uint64_t index() const;
  int clicks() const;
  int d() const { return static_cast<int>(bits.size()); }
  friend bool operator==(const DetectionOutcome&, const DetectionOutcome&) = default;
};

/// Exact probabilities of all 2^d click patterns, indexed like
/// DetectionOutcome::index().
class OutcomeDistribution {
 public:
  OutcomeDistribution(int d, std::vector<double> probs);

  int d() const { return d_; }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::uint64_t index) const { return probs_[index]; }
  double prob(const DetectionOutcome& o) const;

  /// Pr[mode i clicks], by summation over the table.
  double marginal(int mode) const;
  /// Pr[only mode i clicks].
  double single(int mode) const;
  /// Pr[exactly one mode clicks].
  double any_single() const;

 private:
  int d_;
  std::vector<double> probs_;
};

inline constexpr int kMaxEnumerationModes = 20;

/// Pr[|alpha + z/sqrt 2| > gamma] = Q_1(2|alpha|, 2 gamma).
double detect_prob(double alpha_abs, Threshold th);

/// Fourth-order small-amplitude expansion of detect_prob:
/// e^{-2 g^2} (1 + 4 g^2 |alpha|^2 + 4 g^2 (g^2 - 1) |alpha|^4).
double born_expansion(double alpha_abs, Threshold th);

/// Vacuum click probability e^{-2 gamma^2}.
double dark_count_prob(Threshold th);

/// Effective efficiency eta = 4 g^2 e^{-2 g^2} / (1 - e^{-2 g^2}) matching the
/// parametric model 1 - (1 - delta) e^{-eta |alpha|^2}. Throws
/// SingularThreshold at gamma = 0.
double efficiency(Threshold th);

/// p = 1 - (1 - delta) e^{-eta |alpha|^2} with delta the dark-count
/// probability.
double poisson_detection_prob(double alpha_abs, Threshold th);

/// Single-mode fringe visibility (Q_1(2|alpha|, 2g) - delta) / (Q_1 + delta).
double visibility_single(double alpha_abs, Threshold th);

/// q_i = Q_1(2 |alpha psi_i|, 2 gamma) for every mode.
std::vector<double> mode_crossing_probs(const CoherentVector& state, Threshold th);
/// Per-detector thresholds; thresholds.size() must equal state.d().
std::vector<double> mode_crossing_probs(const CoherentVector& state,
                                        const std::vector<Threshold>& thresholds);

/// Odds q_i / (1 - q_i) per mode, with 1 - q_i evaluated without
/// cancellation. A mode whose complement underflows gets +infinity.
std::vector<double> crossing_odds(const CoherentVector& state, Threshold th);

/// Product-Bernoulli table from per-mode click probabilities.
OutcomeDistribution outcome_distribution(const std::vector<double>& q);
/// Throws EnumerationLimit for d > kMaxEnumerationModes.
OutcomeDistribution outcome_distribution(const CoherentVector& state, Threshold th);

/// bits_i = 1 iff |a_i| > gamma.
DetectionOutcome detect_sample(const AmplitudeSample& sample, Threshold th);

/// How noise reaches the detectors in Monte Carlo runs.
enum class NoiseMode {
  kFresh,       // realize(apply(U, state)): new iid noise after the circuit
  kPropagated,  // propagate(U, realize(state)): the input noise is rotated by U
};

/// Histogram of click patterns over n_trials independent realizations
/// (d <= kMaxEnumerationModes). Trials are split into fixed-size blocks with
/// one substream each, so counts are independent of the worker count.
std::vector<std::uint64_t> simulate_outcomes(const CoherentVector& state, Threshold th,
                                             std::uint64_t n_trials, const RngStream& rng);

/// Same, for the input state sent through U, with the noise handled per mode.
std::vector<std::uint64_t> simulate_outcomes(const CoherentVector& input, const UnitaryMatrix& u,
                                             Threshold th, std::uint64_t n_trials,
                                             const RngStream& rng, NoiseMode mode);

}  // namespace bornsim
