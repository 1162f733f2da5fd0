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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bornsim/field.hpp"

namespace bornsim {

/// Max-abs deviation of U^dagger U from the identity.
double unitarity_residual(const CMatrix& m);

/// d x d unitary. Construction checks U^dagger U = I to within the given
/// tolerance (1e-12 unless a caller has a reason to relax it).
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(CMatrix entries, double tolerance = 1e-12);

  static UnitaryMatrix identity(int d);

  const CMatrix& matrix() const { return m_; }
  int d() const { return static_cast<int>(m_.rows()); }
  Complex operator()(int i, int j) const { return m_(i, j); }

  UnitaryMatrix adjoint() const;

  /// Composition: (A * B) applies B first. Dimension-checked.
  friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b);

 private:
  CMatrix m_;
};

/// 50/50 beam splitter, (1/sqrt 2)[[1, 1], [1, -1]].
UnitaryMatrix gate_hadamard();
/// diag(1, e^{i phi}).
UnitaryMatrix gate_phase(double phi);
/// Mode swap / half-wave plate at 45 degrees.
UnitaryMatrix gate_x();
/// Control is the first tensor factor, target the second.
UnitaryMatrix gate_cnot();
UnitaryMatrix kron(const UnitaryMatrix& a, const UnitaryMatrix& b);

/// psi -> U psi, renormalized; alpha is untouched. Noise is not carried
/// along: the transformed noise U z is again iid standard complex Gaussian,
/// so sampling after apply() just draws fresh noise.
CoherentVector apply(const UnitaryMatrix& u, const CoherentVector& state);

/// Explicit propagation a -> U a of one realization (noise included).
AmplitudeSample propagate(const UnitaryMatrix& u, const AmplitudeSample& sample);

/// Haar-distributed unitary: QR of a d x d matrix of iid standard complex
/// Gaussians (drawn column by column), with the phases of diag(R) moved
/// into Q so the distribution is exactly Haar.
UnitaryMatrix haar_unitary(int d, RngStream& rng);

/// Ordered list of gates acting on tensor factors ("wires").
///
/// JSON schema:
///   {"factors": [2, 2],
///    "gates": [{"gate": "H", "wires": [0]},
///              {"gate": "phase", "params": [1.5708], "wires": [0]},
///              {"gate": "X", "wires": [1]},
///              {"gate": "CNOT", "wires": [0, 1]},
///              {"gate": "unitary", "wires": [0],
///               "matrix": [[[re, im], [re, im]], [[re, im], [re, im]]]}]}
/// Factor 0 is the most significant index, so with factors [2, 2] the mode
/// order is [RH, RV, DH, DV] for (spatial, polarization).
class Circuit {
 public:
  explicit Circuit(std::vector<int> factors);

  static Circuit from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Circuit& add(std::string name, std::vector<int> wires, std::vector<double> params = {});
  Circuit& add_unitary(const UnitaryMatrix& u, std::vector<int> wires);

  int d() const { return d_; }
  const std::vector<int>& factors() const { return factors_; }

  /// Full d x d unitary; the first gate listed acts first.
  UnitaryMatrix unitary() const;

 private:
  struct Gate {
    std::string name;
    std::vector<int> wires;
    std::vector<double> params;
    CMatrix matrix;
  };

  UnitaryMatrix embed(const Gate& g) const;

  std::vector<int> factors_;
  int d_ = 1;
  std::vector<Gate> gates_;
};

}  // namespace bornsim
