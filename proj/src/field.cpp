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

#include "bornsim/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bornsim/error.hpp"

namespace bornsim {

namespace {

bool all_finite(const CVector& v) {
  for (const auto& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

}  // namespace

CoherentVector::CoherentVector(Complex alpha, CVector psi) : alpha_(alpha), psi_(std::move(psi)) {
  if (psi_.size() == 0) throw InvalidDimension("coherent state needs at least one mode");
  if (!std::isfinite(alpha_.real()) || !std::isfinite(alpha_.imag()) || !all_finite(psi_)) {
    throw DomainError("coherent state has non-finite components");
  }
  const double norm = psi_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw DomainError("mode direction must have unit norm, got " + std::to_string(norm));
  }
}

CoherentVector CoherentVector::normalized(Complex alpha, const CVector& psi) {
  if (psi.size() == 0) throw InvalidDimension("coherent state needs at least one mode");
  const double norm = psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("cannot normalize mode direction");
  return CoherentVector(alpha, psi / norm);
}

CoherentVector CoherentVector::basis(Complex alpha, int d, int mode) {
  if (d < 1) throw InvalidDimension("mode count must be positive");
  if (mode < 0 || mode >= d) throw DomainError("mode index out of range");
  CVector psi = CVector::Zero(d);
  psi(mode) = 1.0;
  return CoherentVector(alpha, std::move(psi));
}

NoiseRealization sample_noise(int d, RngStream& rng) {
  if (d < 1) throw InvalidDimension("noise dimension must be positive");
  NoiseRealization out{CVector(d)};
  for (int j = 0; j < d; ++j) out.z(j) = rng.standard_complex();
  return out;
}

AmplitudeSample realize(const CoherentVector& state, RngStream& rng) {
  return realize(state, sample_noise(state.d(), rng));
}

AmplitudeSample realize(const CoherentVector& state, const NoiseRealization& noise) {
  if (noise.z.size() != state.d()) throw DimensionMismatch("noise length differs from state");
  return {state.mean() + noise.z * (std::numbers::sqrt2 / 2.0)};
}

double mean_energy_density(const CoherentVector& state, double omega, double volume, double hbar) {
  if (state.d() != 1) throw InvalidDimension("energy density is defined for a single mode");
  if (!(omega > 0.0) || !(volume > 0.0) || !(hbar > 0.0)) {
    throw DomainError("omega, volume and hbar must be positive");
  }
  return (std::norm(state.alpha()) + 0.5) * hbar * omega / volume;
}

}  // namespace bornsim
