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

#include <complex>

#include <Eigen/Dense>

#include "bornsim/rng.hpp"

namespace bornsim {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Tolerance on the unit norm of a mode direction.
inline constexpr double kNormTolerance = 1e-12;

/// d-mode coherent state alpha * psi with ||psi|| = 1.
class CoherentVector {
 public:
  /// Throws InvalidDimension for an empty psi, DomainError for non-finite
  /// entries or a norm outside 1 +- kNormTolerance.
  CoherentVector(Complex alpha, CVector psi);

  /// Rescales psi to unit norm before validation.
  static CoherentVector normalized(Complex alpha, const CVector& psi);

  /// alpha on mode 0, vacuum elsewhere.
  static CoherentVector basis(Complex alpha, int d, int mode = 0);

  Complex alpha() const { return alpha_; }
  const CVector& psi() const { return psi_; }
  int d() const { return static_cast<int>(psi_.size()); }

  /// Mean field alpha * psi.
  CVector mean() const { return alpha_ * psi_; }

 private:
  Complex alpha_;
  CVector psi_;
};

/// One draw of d iid standard complex Gaussians.
struct NoiseRealization {
  CVector z;
};

/// a = alpha psi + z / sqrt(2).
struct AmplitudeSample {
  CVector a;
};

/// z_j = (x_j + i y_j)/sqrt(2); consumes exactly 2d raw draws from rng.
NoiseRealization sample_noise(int d, RngStream& rng);

AmplitudeSample realize(const CoherentVector& state, RngStream& rng);

/// Realization with caller-supplied noise (used for noiseless-limit checks).
AmplitudeSample realize(const CoherentVector& state, const NoiseRealization& noise);

/// Expected time-averaged energy density (|alpha|^2 + 1/2) hbar omega / V of
/// a single-mode state. hbar is configurable; the detection layer works in
/// the dimensionless single-mode limit and never needs it.
double mean_energy_density(const CoherentVector& state, double omega, double volume,
                           double hbar = 1.0);

}  // namespace bornsim
