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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bornsim/detection.hpp"
#include "bornsim/field.hpp"

namespace bornsim {

/// d^2 Hermitian matrices, orthonormal under Tr[A^dagger B], each with its
/// eigensystem B_k = U_k diag(beta_k) U_k^dagger.
///
/// d = 2 and d = 4 use (tensor products of) Pauli matrices scaled by
/// 2^{-n/2}; their eigenvectors are built as Kronecker products of the
/// single-qubit eigenbases, so degenerate eigenspaces get a fixed, product
/// basis. Other d use the generalized Gell-Mann matrices plus I/sqrt(d),
/// diagonalized numerically.
class HermitianBasis {
 public:
  /// Throws InvalidDimension for d < 2.
  static HermitianBasis build(int d);

  int d() const { return d_; }
  std::size_t size() const { return matrices_.size(); }
  const CMatrix& matrix(std::size_t k) const { return matrices_[k]; }
  /// Columns are eigenvectors of matrix(k).
  const CMatrix& eigenvectors(std::size_t k) const { return eigenvectors_[k]; }
  const Eigen::VectorXd& eigenvalues(std::size_t k) const { return eigenvalues_[k]; }

 private:
  int d_ = 0;
  std::vector<CMatrix> matrices_;
  std::vector<CMatrix> eigenvectors_;
  std::vector<Eigen::VectorXd> eigenvalues_;
};

/// Hermitian, unit-trace d x d matrix. Positivity is not required: linear
/// inversion may produce negative eigenvalues.
class DensityMatrix {
 public:
  /// Checks Hermiticity and unit trace to 1e-10.
  explicit DensityMatrix(CMatrix rho);

  /// Hermitizes and divides by the trace; trace_deviation() records how far
  /// the trace was from 1.
  static DensityMatrix normalize(const CMatrix& rho);

  static DensityMatrix pure(const CVector& psi);

  const CMatrix& matrix() const { return rho_; }
  int d() const { return static_cast<int>(rho_.rows()); }
  double trace_deviation() const { return trace_deviation_; }
  Eigen::VectorXd eigenvalues() const;
  double min_eigenvalue() const;

 private:
  CMatrix rho_;
  double trace_deviation_ = 0.0;
};

enum class TomographyMethod { kLinear, kMle };

std::string to_string(TomographyMethod m);

/// m_k = sum_i p_i beta_ki, where p are the single-detection conditional
/// probabilities for the state rotated to U_k^dagger psi.
std::vector<double> measure_expectations(const CoherentVector& state, Threshold th,
                                         const HermitianBasis& basis);

/// Exact expectations Tr[rho B_k].
std::vector<double> expectations(const CMatrix& rho, const HermitianBasis& basis);

/// rho = sum_k m_k B_k, trace-normalized.
DensityMatrix linear_qst(const std::vector<double>& m, const HermitianBasis& basis);

struct MleOptions {
  int max_evaluations = 100000;
  /// Stop after two successive iterations each lowering the objective by
  /// less than this.
  double objective_tolerance = 1e-12;
  double gradient_tolerance = 1e-12;
  /// Weight of I/d mixed into the starting point so its Cholesky factor
  /// exists.
  double initial_mixing = 1e-10;
  /// Weight for a second run; the lower objective wins. 0 disables it.
  double restart_mixing = 1e-3;
};

struct MleResult {
  DensityMatrix rho;
  double objective = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes sum_k (Tr[rho B_k] - m_k)^2 over rho = T^dagger T / Tr[T^dagger T]
/// with T lower triangular (real diagonal, d^2 real parameters), using BFGS
/// with an analytic gradient and backtracking line search. Starts from the
/// linear estimate with negative eigenvalues clipped, once lightly and once
/// more heavily mixed with I/d, sharing one evaluation budget. Deterministic.
MleResult mle_qst(const std::vector<double>& m, const HermitianBasis& basis,
                  const MleOptions& opts = {});

/// Lower-triangular parameterization used by mle_qst, exposed for tests.
namespace mle_detail {
CMatrix unpack(const Eigen::VectorXd& t, int d);
Eigen::VectorXd pack(const CMatrix& lower);
/// Objective and gradient for target A = sum_k m_k B_k (the objective
/// equals ||rho - A||_F^2 because the basis is orthonormal).
double objective(const Eigen::VectorXd& t, const CMatrix& target, Eigen::VectorXd* grad);
/// Lower-triangular T with T^dagger T = rho for positive definite rho.
CMatrix lower_factor(const CMatrix& rho);
}  // namespace mle_detail

/// Re <psi| rho |psi>. Throws DimensionMismatch.
double fidelity(const CVector& psi, const DensityMatrix& rho);

/// Transpose on the second factor of a dA x dB system.
CMatrix partial_transpose(const CMatrix& rho, int d_a, int d_b);

/// Minimum eigenvalue of the partial transpose; negative certifies
/// entanglement for 2 x 2 systems.
double ppt_witness(const CMatrix& rho, int d_a, int d_b);

struct TomographyReport {
  DensityMatrix rho;
  double fidelity = 0.0;
  double min_eigenvalue = 0.0;
  std::optional<double> ppt_min_eigenvalue;
  TomographyMethod method = TomographyMethod::kLinear;
  bool converged = true;
};

/// Measures, reconstructs and scores one state. The witness is filled in
/// when d_a * d_b == d (pass 0 to skip).
TomographyReport tomograph(const CoherentVector& state, Threshold th, const HermitianBasis& basis,
                           TomographyMethod method, int d_a = 0, int d_b = 0,
                           const MleOptions& opts = {});

struct MemberRecord {
  int member = 0;
  double fidelity = 0.0;
  double min_eigenvalue = 0.0;     // of the reported estimate
  double linear_min_eigenvalue = 0.0;
  double ppt_witness = 0.0;        // NaN when not applicable
  bool converged = true;
};

struct SweepPoint {
  double alpha = 0.0;
  double gamma = 0.0;
  double mean_fidelity = 0.0;
  double frac_invalid = 0.0;       // linear estimates with a negative eigenvalue
  double mean_visibility = 0.0;
  double mean_ppt_witness = 0.0;   // NaN when not applicable
  std::vector<MemberRecord> members;
};

struct EnsembleOptions {
  int d = 4;
  int n_states = 100;
  TomographyMethod method = TomographyMethod::kMle;
  MleOptions mle;
  /// Eigenvalues below -invalid_tolerance mark a linear estimate invalid.
  double invalid_tolerance = 1e-10;
};

/// Ensemble member j is the pure direction U_j e_1 with U_j Haar-random
/// from rng.substream(j), so members are identical across grid points and
/// independent of the worker count.
CVector ensemble_direction(int d, const RngStream& rng, int member);

/// Visibility attributed to a swept state: the single-mode visibility at the
/// full coherent amplitude |alpha|, which every member carries on its
/// input mode before the unitary spreads it out.
double ensemble_visibility(double alpha, Threshold th);

/// Sweep over every (alpha, gamma) pair, gamma varying fastest. The
/// witness is evaluated when d = 4 (as 2 x 2).
std::vector<SweepPoint> ensemble_sweep(const std::vector<double>& alphas,
                                       const std::vector<double>& gammas,
                                       const EnsembleOptions& opts, const RngStream& rng);

}  // namespace bornsim
