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

#include "bornsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bornsim/error.hpp"
#include "bornsim/experiments.hpp"
#include "bornsim/optics.hpp"
#include "bornsim/parallel.hpp"

namespace bornsim {

namespace {

constexpr double kHermitianTolerance = 1e-10;

CMatrix ckron(const CMatrix& a, const CMatrix& b) {
  CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return m;
}

Eigen::VectorXd vkron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd v(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a(i) * b;
  return v;
}

struct Pauli {
  CMatrix m;
  CMatrix vecs;
  Eigen::VectorXd vals;
};

// I, X, Y, Z with eigenvalues ordered (+1, -1) for the traceless ones.
std::vector<Pauli> paulis() {
  const Complex i1(0.0, 1.0);
  const double s = std::numbers::sqrt2 / 2.0;
  std::vector<Pauli> p(4);
  p[0].m = CMatrix::Identity(2, 2);
  p[0].vecs = CMatrix::Identity(2, 2);
  p[0].vals = Eigen::Vector2d(1.0, 1.0);

  p[1].m.resize(2, 2);
  p[1].m << 0.0, 1.0, 1.0, 0.0;
  p[1].vecs.resize(2, 2);
  p[1].vecs << s, s, s, -s;

  p[2].m.resize(2, 2);
  p[2].m << 0.0, -i1, i1, 0.0;
  p[2].vecs.resize(2, 2);
  p[2].vecs << s, s, s * i1, -s * i1;

  p[3].m.resize(2, 2);
  p[3].m << 1.0, 0.0, 0.0, -1.0;
  p[3].vecs = CMatrix::Identity(2, 2);
  for (int k = 1; k < 4; ++k) p[k].vals = Eigen::Vector2d(1.0, -1.0);
  return p;
}

CMatrix unit(int d, int r, int c) {
  CMatrix m = CMatrix::Zero(d, d);
  m(r, c) = 1.0;
  return m;
}

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

// -- HermitianBasis --------------------------------------------------------------

HermitianBasis HermitianBasis::build(int d) {
  if (d < 2) throw InvalidDimension("tomography basis needs d >= 2");
  HermitianBasis b;
  b.d_ = d;

  if (d == 2 || d == 4) {
    const auto p = paulis();
    const int qubits = d == 2 ? 1 : 2;
    const double scale = std::pow(std::numbers::sqrt2 / 2.0, qubits);
    const int count = qubits == 1 ? 4 : 16;
    for (int k = 0; k < count; ++k) {
      CMatrix m(1, 1), v(1, 1);
      m(0, 0) = 1.0;
      v(0, 0) = 1.0;
      Eigen::VectorXd vals = Eigen::VectorXd::Ones(1);
      // Digit of k for each qubit, most significant first.
      for (int q = qubits - 1; q >= 0; --q) {
        const int idx = (k >> (2 * q)) & 3;
        m = ckron(m, p[idx].m);
        v = ckron(v, p[idx].vecs);
        vals = vkron(vals, p[idx].vals);
      }
      b.matrices_.push_back(scale * m);
      b.eigenvectors_.push_back(v);
      b.eigenvalues_.push_back(scale * vals);
    }
    return b;
  }

  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  const Complex i1(0.0, 1.0);
  b.matrices_.push_back(CMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      b.matrices_.push_back(inv_sqrt2 * (unit(d, j, k) + unit(d, k, j)));
      b.matrices_.push_back(inv_sqrt2 * (-i1 * unit(d, j, k) + i1 * unit(d, k, j)));
    }
  }
  for (int l = 1; l < d; ++l) {
    CMatrix m = CMatrix::Zero(d, d);
    for (int j = 0; j < l; ++j) m(j, j) = 1.0;
    m(l, l) = -static_cast<double>(l);
    b.matrices_.push_back(m / std::sqrt(static_cast<double>(l) * (l + 1)));
  }
  for (const auto& m : b.matrices_) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    b.eigenvectors_.push_back(es.eigenvectors());
    b.eigenvalues_.push_back(es.eigenvalues());
  }
  return b;
}

// -- DensityMatrix ---------------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
    throw InvalidDimension("density matrix must be square and non-empty");
  }
  if (!rho_.allFinite()) throw DomainError("density matrix has non-finite entries");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
    throw DomainError("density matrix is not Hermitian");
  }
  if (std::abs(rho_.trace() - 1.0) > kHermitianTolerance) {
    throw DomainError("density matrix trace is not 1");
  }
}

DensityMatrix DensityMatrix::normalize(const CMatrix& rho) {
  const CMatrix h = hermitize(rho);
  const double tr = h.trace().real();
  if (!(std::abs(tr) > 0.0) || !std::isfinite(tr)) throw DomainError("cannot normalize a zero-trace matrix");
  DensityMatrix out(h / tr);
  out.trace_deviation_ = tr - 1.0;
  return out;
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw DomainError("pure state needs a nonzero vector");
  const CVector u = psi / n;
  return DensityMatrix(hermitize(u * u.adjoint()));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(rho_, Eigen::EigenvaluesOnly).eigenvalues();
}

double DensityMatrix::min_eigenvalue() const { return eigenvalues()(0); }

std::string to_string(TomographyMethod m) { return m == TomographyMethod::kMle ? "mle" : "linear"; }

// -- Measurement and linear inversion ----------------------------------------------

std::vector<double> measure_expectations(const CoherentVector& state, Threshold th,
                                         const HermitianBasis& basis) {
  if (state.d() != basis.d()) throw DimensionMismatch("state and basis dimensions differ");
  std::vector<double> m(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const CVector rotated = basis.eigenvectors(k).adjoint() * state.psi();
    const auto p = conditional_mode_probs(CoherentVector::normalized(state.alpha(), rotated), th);
    double s = 0.0;
    for (int i = 0; i < basis.d(); ++i) s += p[i] * basis.eigenvalues(k)(i);
    m[k] = s;
  }
  return m;
}

std::vector<double> expectations(const CMatrix& rho, const HermitianBasis& basis) {
  if (rho.rows() != basis.d() || rho.cols() != basis.d()) {
    throw DimensionMismatch("matrix and basis dimensions differ");
  }
  std::vector<double> m(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) m[k] = (rho * basis.matrix(k)).trace().real();
  return m;
}

namespace {

CMatrix combine(const std::vector<double>& m, const HermitianBasis& basis) {
  if (m.size() != basis.size()) throw DimensionMismatch("expectation vector length must be d^2");
  CMatrix a = CMatrix::Zero(basis.d(), basis.d());
  for (std::size_t k = 0; k < basis.size(); ++k) a += m[k] * basis.matrix(k);
  return a;
}

}  // namespace

DensityMatrix linear_qst(const std::vector<double>& m, const HermitianBasis& basis) {
  return DensityMatrix::normalize(combine(m, basis));
}

// -- MLE ---------------------------------------------------------------------------

namespace mle_detail {

// Layout: d real diagonal entries, then (re, im) of each strictly lower entry
// in row-major order.
CMatrix unpack(const Eigen::VectorXd& t, int d) {
  CMatrix lower = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) lower(i, i) = t(i);
  int p = d;
  for (int i = 1; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      lower(i, j) = Complex(t(p), t(p + 1));
      p += 2;
    }
  }
  return lower;
}

Eigen::VectorXd pack(const CMatrix& lower) {
  const int d = static_cast<int>(lower.rows());
  Eigen::VectorXd t(d * d);
  for (int i = 0; i < d; ++i) t(i) = lower(i, i).real();
  int p = d;
  for (int i = 1; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      t(p) = lower(i, j).real();
      t(p + 1) = lower(i, j).imag();
      p += 2;
    }
  }
  return t;
}

double objective(const Eigen::VectorXd& t, const CMatrix& target, Eigen::VectorXd* grad) {
  const int d = static_cast<int>(target.rows());
  const CMatrix tm = unpack(t, d);
  const CMatrix gram = tm.adjoint() * tm;
  const double s = gram.trace().real();
  if (!(s > 0.0)) {
    if (grad) grad->setZero(t.size());
    return std::numeric_limits<double>::infinity();
  }
  const CMatrix rho = gram / s;
  const CMatrix g = rho - target;
  const double f = g.cwiseAbs2().sum();
  if (grad) {
    // With G = rho - A, c = Tr[G rho] and M = (G - c I) T^dagger:
    //   df/dRe T_ij = (4/s) Re M_ji,  df/dIm T_ij = -(4/s) Im M_ji.
    const double c = (g * rho).trace().real();
    const CMatrix mm = (g - c * CMatrix::Identity(d, d)) * tm.adjoint();
    grad->resize(t.size());
    for (int i = 0; i < d; ++i) (*grad)(i) = 4.0 / s * mm(i, i).real();
    int p = d;
    for (int i = 1; i < d; ++i) {
      for (int j = 0; j < i; ++j) {
        (*grad)(p) = 4.0 / s * mm(j, i).real();
        (*grad)(p + 1) = -4.0 / s * mm(j, i).imag();
        p += 2;
      }
    }
  }
  return f;
}

CMatrix lower_factor(const CMatrix& rho) {
  const int d = static_cast<int>(rho.rows());
  // J rho J = L L^dagger with J the exchange matrix; then T = (J L J)^dagger
  // is lower triangular and T^dagger T = rho.
  const CMatrix flipped = rho.colwise().reverse().rowwise().reverse();
  Eigen::LLT<CMatrix> llt(hermitize(flipped));
  if (llt.info() != Eigen::Success) throw DomainError("starting point is not positive definite");
  const CMatrix l = llt.matrixL();
  const CMatrix k = l.colwise().reverse().rowwise().reverse();
  CMatrix t = k.adjoint();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) t(i, j) = 0.0;
  }
  return t;
}

}  // namespace mle_detail

namespace {

// One BFGS run from the clipped linear estimate mixed with `mixing` of I/d.
MleResult minimize_from(const CMatrix& target, double mixing, int budget, const MleOptions& opts) {
  using Eigen::VectorXd;
  const int d = static_cast<int>(target.rows());

  Eigen::SelfAdjointEigenSolver<CMatrix> es(target);
  VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  if (!(lam.sum() > 0.0)) lam.setOnes();
  lam /= lam.sum();
  CMatrix start = es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  start = (1.0 - mixing) * hermitize(start) + mixing / d * CMatrix::Identity(d, d);

  VectorXd x = mle_detail::pack(mle_detail::lower_factor(start));
  VectorXd g;
  int evals = 0;
  auto eval = [&](const VectorXd& p, VectorXd* gr) {
    ++evals;
    return mle_detail::objective(p, target, gr);
  };
  double f = eval(x, &g);

  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  bool converged = false;
  int small_steps = 0;
  int iterations = 0;
  bool reset_once = false;

  while (evals < budget) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      converged = true;
      break;
    }
    VectorXd dir = -h * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      h.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }

    // Backtracking line search with the Armijo condition.
    double step = 1.0;
    VectorXd x_new, g_new;
    double f_new = f;
    bool accepted = false;
    while (evals < budget) {
      x_new = x + step * dir;
      f_new = eval(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (!accepted) {
      if (!reset_once) {
        // Retry once along the steepest-descent direction.
        h.setIdentity();
        reset_once = true;
        continue;
      }
      // No representable decrease is left: the objective sits at its
      // numerical floor.
      converged = true;
      break;
    }
    reset_once = false;
    ++iterations;

    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    const double decrease = f - f_new;
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;

    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (!scaled) {
        h *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho_k = 1.0 / sy;
      const VectorXd hy = h * y;
      // BFGS inverse-Hessian update.
      h += (rho_k * rho_k * y.dot(hy) + rho_k) * (s * s.transpose()) -
           rho_k * (hy * s.transpose() + s * hy.transpose());
    }

    small_steps = decrease < opts.objective_tolerance ? small_steps + 1 : 0;
    if (small_steps >= 2) {
      converged = true;
      break;
    }
  }

  const CMatrix tm = mle_detail::unpack(x, d);
  const CMatrix gram = tm.adjoint() * tm;
  return MleResult{DensityMatrix::normalize(gram), f, evals, iterations, converged};
}

}  // namespace

MleResult mle_qst(const std::vector<double>& m, const HermitianBasis& basis, const MleOptions& opts) {
  const CMatrix target = hermitize(combine(m, basis));
  // A nearly singular start is exact for valid targets but can stall on the
  // flat directions of a rank-deficient factor; the heavier mix escapes them.
  MleResult best = minimize_from(target, opts.initial_mixing, opts.max_evaluations, opts);
  const int left = opts.max_evaluations - best.evaluations;
  if (opts.restart_mixing > 0.0 && left > 0) {
    MleResult alt = minimize_from(target, opts.restart_mixing, left, opts);
    const int total = best.evaluations + alt.evaluations;
    const int iters = best.iterations + alt.iterations;
    if (alt.objective < best.objective) best = std::move(alt);
    best.evaluations = total;
    best.iterations = iters;
  }
  return best;
}

// -- Scores ------------------------------------------------------------------------

double fidelity(const CVector& psi, const DensityMatrix& rho) {
  if (psi.size() != rho.d()) throw DimensionMismatch("state and density matrix dimensions differ");
  return psi.dot(rho.matrix() * psi).real();
}

CMatrix partial_transpose(const CMatrix& rho, int d_a, int d_b) {
  if (d_a < 1 || d_b < 1 || rho.rows() != d_a * d_b || rho.cols() != d_a * d_b) {
    throw DimensionMismatch("factor dimensions do not match the density matrix");
  }
  CMatrix out(rho.rows(), rho.cols());
  for (int i = 0; i < d_a; ++i) {
    for (int j = 0; j < d_b; ++j) {
      for (int k = 0; k < d_a; ++k) {
        for (int l = 0; l < d_b; ++l) out(i * d_b + j, k * d_b + l) = rho(i * d_b + l, k * d_b + j);
      }
    }
  }
  return out;
}

double ppt_witness(const CMatrix& rho, int d_a, int d_b) {
  const CMatrix pt = hermitize(partial_transpose(rho, d_a, d_b));
  return Eigen::SelfAdjointEigenSolver<CMatrix>(pt, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

TomographyReport tomograph(const CoherentVector& state, Threshold th, const HermitianBasis& basis,
                           TomographyMethod method, int d_a, int d_b, const MleOptions& opts) {
  const auto m = measure_expectations(state, th, basis);
  TomographyReport rep{linear_qst(m, basis), 0.0, 0.0, std::nullopt};
  rep.method = method;
  if (method == TomographyMethod::kMle) {
    auto r = mle_qst(m, basis, opts);
    rep.rho = r.rho;
    rep.converged = r.converged;
  }
  rep.fidelity = fidelity(state.psi(), rep.rho);
  rep.min_eigenvalue = rep.rho.min_eigenvalue();
  if (d_a > 0 && d_b > 0 && d_a * d_b == state.d()) {
    rep.ppt_min_eigenvalue = ppt_witness(rep.rho.matrix(), d_a, d_b);
  }
  return rep;
}

// -- Ensembles ---------------------------------------------------------------------

CVector ensemble_direction(int d, const RngStream& rng, int member) {
  RngStream s = rng.substream(static_cast<std::uint64_t>(member));
  return haar_unitary(d, s).matrix().col(0);
}

double ensemble_visibility(double alpha, Threshold th) { return visibility_single(std::abs(alpha), th); }

std::vector<SweepPoint> ensemble_sweep(const std::vector<double>& alphas,
                                       const std::vector<double>& gammas,
                                       const EnsembleOptions& opts, const RngStream& rng) {
  if (opts.n_states < 1) throw DomainError("ensemble needs at least one state");
  const HermitianBasis basis = HermitianBasis::build(opts.d);
  const bool witness = opts.d == 4;

  std::vector<SweepPoint> points;
  for (double a : alphas) {
    for (double g : gammas) {
      SweepPoint p;
      p.alpha = a;
      p.gamma = g;
      p.mean_visibility = ensemble_visibility(a, Threshold(g));
      p.members.resize(opts.n_states);
      points.push_back(std::move(p));
    }
  }

  parallel_for(static_cast<std::size_t>(opts.n_states), [&](std::size_t j) {
    const CVector psi = ensemble_direction(opts.d, rng, static_cast<int>(j));
    for (auto& p : points) {
      const CoherentVector state(p.alpha, psi);
      const Threshold th(p.gamma);
      const auto m = measure_expectations(state, th, basis);
      const DensityMatrix lin = linear_qst(m, basis);
      MemberRecord rec;
      rec.member = static_cast<int>(j);
      rec.linear_min_eigenvalue = lin.min_eigenvalue();
      DensityMatrix est = lin;
      if (opts.method == TomographyMethod::kMle) {
        auto r = mle_qst(m, basis, opts.mle);
        est = r.rho;
        rec.converged = r.converged;
      }
      rec.fidelity = fidelity(psi, est);
      rec.min_eigenvalue = est.min_eigenvalue();
      rec.ppt_witness = witness ? ppt_witness(est.matrix(), 2, 2) : NAN;
      p.members[j] = rec;
    }
  });

  for (auto& p : points) {
    double f = 0.0, w = 0.0;
    int invalid = 0;
    for (const auto& r : p.members) {
      f += r.fidelity;
      w += r.ppt_witness;
      if (r.linear_min_eigenvalue < -opts.invalid_tolerance) ++invalid;
    }
    p.mean_fidelity = f / opts.n_states;
    p.mean_ppt_witness = witness ? w / opts.n_states : NAN;
    p.frac_invalid = static_cast<double>(invalid) / opts.n_states;
  }
  return points;
}

}  // namespace bornsim
