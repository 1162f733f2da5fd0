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

#include "bornsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bornsim/error.hpp"
#include "bornsim/parallel.hpp"

namespace bornsim {

Threshold::Threshold(double gamma) : gamma_(gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0) throw DomainError("threshold must be finite and >= 0");
}

DetectionOutcome DetectionOutcome::from_index(std::uint64_t index, int d) {
  DetectionOutcome o{std::vector<std::uint8_t>(d)};
  for (int i = 0; i < d; ++i) o.bits[i] = (index >> i) & 1U;
  return o;
}

std::uint64_t DetectionOutcome::index() const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) idx |= static_cast<std::uint64_t>(bits[i] != 0) << i;
  return idx;
}

int DetectionOutcome::clicks() const {
  int n = 0;
  for (auto b : bits) n += b != 0;
  return n;
}

OutcomeDistribution::OutcomeDistribution(int d, std::vector<double> probs)
    : d_(d), probs_(std::move(probs)) {
  if (d < 1 || d > kMaxEnumerationModes) throw EnumerationLimit("outcome table needs 1 <= d <= 20");
  if (probs_.size() != (std::size_t{1} << d)) throw DimensionMismatch("outcome table has wrong size");
}

double OutcomeDistribution::prob(const DetectionOutcome& o) const {
  if (o.d() != d_) throw DimensionMismatch("outcome length differs from table");
  return probs_[o.index()];
}

double OutcomeDistribution::marginal(int mode) const {
  if (mode < 0 || mode >= d_) throw DomainError("mode index out of range");
  double s = 0.0;
  for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
    if ((idx >> mode) & 1U) s += probs_[idx];
  }
  return s;
}

double OutcomeDistribution::single(int mode) const {
  if (mode < 0 || mode >= d_) throw DomainError("mode index out of range");
  return probs_[std::size_t{1} << mode];
}

double OutcomeDistribution::any_single() const {
  double s = 0.0;
  for (int i = 0; i < d_; ++i) s += single(i);
  return s;
}

double detect_prob(double alpha_abs, Threshold th) {
  if (!std::isfinite(alpha_abs) || alpha_abs < 0.0) throw DomainError("amplitude must be finite and >= 0");
  return marcum_q1(2.0 * alpha_abs, 2.0 * th.gamma());
}

double born_expansion(double alpha_abs, Threshold th) {
  const double g2 = th.gamma() * th.gamma();
  const double a2 = alpha_abs * alpha_abs;
  return std::exp(-2.0 * g2) * (1.0 + 4.0 * g2 * a2 + 4.0 * g2 * (g2 - 1.0) * a2 * a2);
}

double dark_count_prob(Threshold th) { return std::exp(-2.0 * th.gamma() * th.gamma()); }

double efficiency(Threshold th) {
  if (th.gamma() == 0.0) throw SingularThreshold("efficiency is undefined at gamma = 0");
  const double g2 = th.gamma() * th.gamma();
  return 4.0 * g2 * std::exp(-2.0 * g2) / -std::expm1(-2.0 * g2);
}

double poisson_detection_prob(double alpha_abs, Threshold th) {
  const double delta = dark_count_prob(th);
  if (alpha_abs == 0.0) return delta;
  return 1.0 - (1.0 - delta) * std::exp(-efficiency(th) * alpha_abs * alpha_abs);
}

double visibility_single(double alpha_abs, Threshold th) {
  const double q = detect_prob(alpha_abs, th);
  const double delta = dark_count_prob(th);
  return (q - delta) / (q + delta);
}

std::vector<double> mode_crossing_probs(const CoherentVector& state, Threshold th) {
  return mode_crossing_probs(state, std::vector<Threshold>(state.d(), th));
}

std::vector<double> mode_crossing_probs(const CoherentVector& state,
                                        const std::vector<Threshold>& thresholds) {
  if (static_cast<int>(thresholds.size()) != state.d()) {
    throw DimensionMismatch("one threshold per mode is required");
  }
  const double amp = std::abs(state.alpha());
  std::vector<double> q(state.d());
  for (int i = 0; i < state.d(); ++i) q[i] = detect_prob(amp * std::abs(state.psi()(i)), thresholds[i]);
  return q;
}

std::vector<double> crossing_odds(const CoherentVector& state, Threshold th) {
  const double amp = std::abs(state.alpha());
  std::vector<double> r(state.d());
  for (int i = 0; i < state.d(); ++i) {
    const auto [q, c] = marcum_q1_pair(2.0 * amp * std::abs(state.psi()(i)), 2.0 * th.gamma());
    r[i] = c > 0.0 ? q / c : INFINITY;
  }
  return r;
}

OutcomeDistribution outcome_distribution(const std::vector<double>& q) {
  const int d = static_cast<int>(q.size());
  if (d > kMaxEnumerationModes) {
    throw EnumerationLimit("2^" + std::to_string(d) + " outcomes exceed the enumeration cap; use Monte Carlo");
  }
  if (d < 1) throw InvalidDimension("outcome table needs at least one mode");
  std::vector<double> probs(std::size_t{1} << d);
  // Doubling construction: after processing mode i the first 2^{i+1}
  // entries hold the joint table of modes 0..i.
  probs[0] = 1.0;
  for (int i = 0; i < d; ++i) {
    const std::size_t half = std::size_t{1} << i;
    for (std::size_t idx = 0; idx < half; ++idx) {
      probs[idx | half] = probs[idx] * q[i];
      probs[idx] *= 1.0 - q[i];
    }
  }
  return OutcomeDistribution(d, std::move(probs));
}

OutcomeDistribution outcome_distribution(const CoherentVector& state, Threshold th) {
  if (state.d() > kMaxEnumerationModes) {
    throw EnumerationLimit("2^" + std::to_string(state.d()) +
                           " outcomes exceed the enumeration cap; use Monte Carlo");
  }
  return outcome_distribution(mode_crossing_probs(state, th));
}

DetectionOutcome detect_sample(const AmplitudeSample& sample, Threshold th) {
  DetectionOutcome o{std::vector<std::uint8_t>(sample.a.size())};
  const double g = th.gamma();
  for (Eigen::Index i = 0; i < sample.a.size(); ++i) o.bits[i] = std::abs(sample.a(i)) > g;
  return o;
}

namespace {

constexpr std::uint64_t kTrialBlock = 1 << 14;

template <typename Draw>
std::vector<std::uint64_t> histogram(int d, std::uint64_t n_trials, const RngStream& rng,
                                     Draw draw) {
  if (d > kMaxEnumerationModes) throw EnumerationLimit("histogram needs d <= 20");
  const std::uint64_t blocks = (n_trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<std::vector<std::uint64_t>> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    RngStream local = rng.substream(b);
    auto& counts = partial[b];
    counts.assign(std::size_t{1} << d, 0);
    const std::uint64_t begin = b * kTrialBlock;
    const std::uint64_t end = std::min(n_trials, begin + kTrialBlock);
    for (std::uint64_t t = begin; t < end; ++t) ++counts[draw(local).index()];
  });
  std::vector<std::uint64_t> total(std::size_t{1} << d, 0);
  for (const auto& c : partial) {
    for (std::size_t i = 0; i < c.size(); ++i) total[i] += c[i];
  }
  return total;
}

}  // namespace

std::vector<std::uint64_t> simulate_outcomes(const CoherentVector& state, Threshold th,
                                             std::uint64_t n_trials, const RngStream& rng) {
  return histogram(state.d(), n_trials, rng,
                   [&](RngStream& r) { return detect_sample(realize(state, r), th); });
}

std::vector<std::uint64_t> simulate_outcomes(const CoherentVector& input, const UnitaryMatrix& u,
                                             Threshold th, std::uint64_t n_trials,
                                             const RngStream& rng, NoiseMode mode) {
  if (u.d() != input.d()) throw DimensionMismatch("unitary and state dimensions differ");
  if (mode == NoiseMode::kFresh) return simulate_outcomes(apply(u, input), th, n_trials, rng);
  return histogram(input.d(), n_trials, rng, [&](RngStream& r) {
    return detect_sample(propagate(u, realize(input, r)), th);
  });
}

}  // namespace bornsim
