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

#include "bornsim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bornsim/error.hpp"

namespace bornsim {

double unitarity_residual(const CMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  const CMatrix gram = m.adjoint() * m;
  return (gram - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

UnitaryMatrix::UnitaryMatrix(CMatrix entries, double tolerance) : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw InvalidDimension("unitary must be square and non-empty");
  }
  const double r = unitarity_residual(m_);
  if (!(r <= tolerance)) {
    throw DomainError("matrix is not unitary (residual " + std::to_string(r) + ")");
  }
}

UnitaryMatrix UnitaryMatrix::identity(int d) {
  if (d < 1) throw InvalidDimension("identity dimension must be positive");
  return UnitaryMatrix(CMatrix::Identity(d, d));
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(m_.adjoint()); }

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  if (a.d() != b.d()) throw DimensionMismatch("cannot compose unitaries of different size");
  return UnitaryMatrix(a.m_ * b.m_, 1e-10);
}

UnitaryMatrix gate_hadamard() {
  const double s = std::numbers::sqrt2 / 2.0;
  CMatrix m(2, 2);
  m << s, s, s, -s;
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix gate_phase(double phi) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(1, 1) = std::polar(1.0, phi);
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix gate_x() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix gate_cnot() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = 1.0;
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix kron(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  const int da = a.d();
  const int db = b.d();
  CMatrix m(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      m.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
    }
  }
  return UnitaryMatrix(std::move(m), 1e-10);
}

CoherentVector apply(const UnitaryMatrix& u, const CoherentVector& state) {
  if (u.d() != state.d()) throw DimensionMismatch("unitary and state dimensions differ");
  return CoherentVector::normalized(state.alpha(), u.matrix() * state.psi());
}

AmplitudeSample propagate(const UnitaryMatrix& u, const AmplitudeSample& sample) {
  if (u.d() != sample.a.size()) throw DimensionMismatch("unitary and sample dimensions differ");
  return {u.matrix() * sample.a};
}

UnitaryMatrix haar_unitary(int d, RngStream& rng) {
  if (d < 1) throw InvalidDimension("Haar dimension must be positive");
  CMatrix g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = rng.standard_complex();
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    // diag(R) is nonzero with probability one.
    if (mag > 0.0) q.col(j) *= rjj / mag;
  }
  return UnitaryMatrix(std::move(q), 1e-10);
}

// -- Circuit ---------------------------------------------------------------

Circuit::Circuit(std::vector<int> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvalidDimension("circuit needs at least one factor");
  d_ = 1;
  for (int f : factors_) {
    if (f < 1) throw InvalidDimension("factor dimensions must be positive");
    d_ *= f;
    if (d_ > (1 << 20)) throw InvalidDimension("circuit dimension too large");
  }
}

Circuit& Circuit::add(std::string name, std::vector<int> wires, std::vector<double> params) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  CMatrix m;
  if (key == "h" || key == "hadamard" || key == "bs") {
    m = gate_hadamard().matrix();
  } else if (key == "x" || key == "hwp") {
    m = gate_x().matrix();
  } else if (key == "phase" || key == "r") {
    if (params.size() != 1) throw DomainError("phase gate takes one parameter");
    m = gate_phase(params[0]).matrix();
  } else if (key == "cnot" || key == "cx") {
    m = gate_cnot().matrix();
  } else if (key == "i" || key == "id") {
    m = CMatrix::Identity(2, 2);
  } else {
    throw DomainError("unknown gate '" + name + "'");
  }
  add_unitary(UnitaryMatrix(std::move(m)), std::move(wires));
  gates_.back().name = std::move(name);
  gates_.back().params = std::move(params);
  return *this;
}

Circuit& Circuit::add_unitary(const UnitaryMatrix& u, std::vector<int> wires) {
  int dim = 1;
  for (std::size_t k = 0; k < wires.size(); ++k) {
    const int w = wires[k];
    if (w < 0 || w >= static_cast<int>(factors_.size())) throw DomainError("wire index out of range");
    if (std::count(wires.begin(), wires.end(), w) != 1) throw DomainError("repeated wire");
    dim *= factors_[w];
  }
  if (wires.empty() || dim != u.d()) throw DimensionMismatch("gate size does not match its wires");
  gates_.push_back({"unitary", std::move(wires), {}, u.matrix()});
  return *this;
}

UnitaryMatrix Circuit::embed(const Gate& g) const {
  const int n = static_cast<int>(factors_.size());
  // Row-major digit strides, factor 0 most significant.
  std::vector<int> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * factors_[k + 1];

  auto digit = [&](int index, int k) { return (index / stride[k]) % factors_[k]; };
  // Local gate index of a global basis index, over the gate's wires.
  auto local = [&](int index) {
    int l = 0;
    for (int w : g.wires) l = l * factors_[w] + digit(index, w);
    return l;
  };
  auto spectators_equal = [&](int a, int b) {
    for (int k = 0; k < n; ++k) {
      if (std::find(g.wires.begin(), g.wires.end(), k) != g.wires.end()) continue;
      if (digit(a, k) != digit(b, k)) return false;
    }
    return true;
  };

  CMatrix full = CMatrix::Zero(d_, d_);
  for (int r = 0; r < d_; ++r) {
    for (int c = 0; c < d_; ++c) {
      if (spectators_equal(r, c)) full(r, c) = g.matrix(local(r), local(c));
    }
  }
  return UnitaryMatrix(std::move(full), 1e-10);
}

UnitaryMatrix Circuit::unitary() const {
  UnitaryMatrix u = UnitaryMatrix::identity(d_);
  for (const auto& g : gates_) u = embed(g) * u;
  return u;
}

Circuit Circuit::from_json(const nlohmann::json& j) {
  std::vector<int> factors;
  if (j.contains("factors")) {
    factors = j.at("factors").get<std::vector<int>>();
  } else if (j.contains("modes")) {
    factors = {j.at("modes").get<int>()};
  } else {
    throw DomainError("circuit needs 'factors' or 'modes'");
  }
  Circuit c(std::move(factors));
  for (const auto& g : j.value("gates", nlohmann::json::array())) {
    const auto name = g.at("gate").get<std::string>();
    auto wires = g.value("wires", std::vector<int>{0});
    if (name == "unitary") {
      const auto& rows = g.at("matrix");
      const int n = static_cast<int>(rows.size());
      CMatrix m(n, n);
      for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n) throw DomainError("unitary matrix must be square");
        for (int col = 0; col < n; ++col) {
          const auto& e = rows[r][col];
          m(r, col) = e.is_array() ? Complex(e.at(0).get<double>(), e.at(1).get<double>())
                                   : Complex(e.get<double>(), 0.0);
        }
      }
      c.add_unitary(UnitaryMatrix(std::move(m), 1e-9), std::move(wires));
    } else {
      c.add(name, std::move(wires), g.value("params", std::vector<double>{}));
    }
  }
  return c;
}

nlohmann::json Circuit::to_json() const {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : gates_) {
    nlohmann::json e{{"gate", g.name}, {"wires", g.wires}};
    if (!g.params.empty()) e["params"] = g.params;
    if (g.name == "unitary") {
      nlohmann::json rows = nlohmann::json::array();
      for (int r = 0; r < g.matrix.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < g.matrix.cols(); ++c) row.push_back({g.matrix(r, c).real(), g.matrix(r, c).imag()});
        rows.push_back(row);
      }
      e["matrix"] = rows;
    }
    gates.push_back(e);
  }
  return {{"factors", factors_}, {"gates", gates}};
}

}  // namespace bornsim
