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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "bornsim/error.hpp"

namespace bornsim {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double deg) { return deg * kPi / 180.0; }

template <class T>
void check_length(const ScenarioResult& r, const std::vector<T>& v, const std::string& name) {
  if (v.size() != r.grid.size()) {
    throw DimensionMismatch("curve '" + name + "' does not match the grid length");
  }
}

template <class Entry>
auto find_entry(const std::vector<Entry>& entries, const std::string& name) {
  return std::find_if(entries.begin(), entries.end(),
                      [&](const auto& e) { return e.first == name; });
}

nlohmann::json threshold_meta(double alpha, Threshold th) {
  return {{"alpha", alpha}, {"gamma", th.gamma()}};
}

// One Monte Carlo histogram per grid point, each on its own substream.
std::vector<std::vector<std::uint64_t>> histograms(std::size_t n_points,
                                                   const std::function<CoherentVector(std::size_t)>& state_at,
                                                   Threshold th, std::int64_t n_trials,
                                                   const RngStream& rng) {
  std::vector<std::vector<std::uint64_t>> out(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    out[i] = simulate_outcomes(state_at(i), th, static_cast<std::uint64_t>(n_trials),
                               rng.substream(i));
  }
  return out;
}

std::vector<std::int64_t> column(const std::vector<std::vector<std::uint64_t>>& h,
                                 std::uint64_t outcome) {
  std::vector<std::int64_t> c(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) c[i] = static_cast<std::int64_t>(h[i][outcome]);
  return c;
}

UnitaryMatrix hyper_circuit() {
  Circuit c({2, 2});
  c.add("H", {0}).add("CNOT", {0, 1});
  return c.unitary();
}

UnitaryMatrix mz_circuit(double phi) {
  Circuit c({2});
  c.add("H", {0}).add("phase", {0}, {phi}).add("H", {0});
  return c.unitary();
}

UnitaryMatrix delayed_choice_circuit(double phi) {
  Circuit c({2});
  c.add("H", {0}).add("phase", {0}, {phi});
  return c.unitary();
}

UnitaryMatrix which_way_circuit(double phi) {
  Circuit c({2, 2});
  c.add("H", {0}).add("phase", {0}, {phi}).add("CNOT", {0, 1}).add("H", {0});
  return c.unitary();
}

}  // namespace

// -- ScenarioResult ------------------------------------------------------------

void ScenarioResult::add_curve(std::string curve_name, std::vector<double> values) {
  check_length(*this, values, curve_name);
  order.emplace_back(curve_name, false);
  analytic.emplace_back(std::move(curve_name), std::move(values));
}

void ScenarioResult::add_counts(std::string curve_name, std::vector<std::int64_t> values) {
  check_length(*this, values, curve_name);
  order.emplace_back(curve_name, true);
  counts.emplace_back(std::move(curve_name), std::move(values));
}

const std::vector<double>& ScenarioResult::curve(const std::string& curve_name) const {
  auto it = find_entry(analytic, curve_name);
  if (it == analytic.end()) throw DomainError("no curve named '" + curve_name + "'");
  return it->second;
}

const std::vector<std::int64_t>& ScenarioResult::count(const std::string& curve_name) const {
  auto it = find_entry(counts, curve_name);
  if (it == counts.end()) throw DomainError("no counts named '" + curve_name + "'");
  return it->second;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw InvalidDimension("linspace needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> v(n);
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) v[i] = lo + step * i;
  v.back() = hi;
  return v;
}

// -- Single-mode scans ---------------------------------------------------------

ScenarioResult polarization_scan(double alpha0, Threshold th, const std::vector<double>& thetas_deg,
                                 std::int64_t n_trials, const RngStream& rng) {
  if (n_trials < 1) throw DomainError("polarization scan needs at least one trial");
  ScenarioResult r;
  r.name = "counts";
  r.grid_name = "theta";
  r.grid = thetas_deg;
  r.meta = threshold_meta(alpha0, th);
  r.meta["N"] = n_trials;
  r.meta["seed"] = rng.seed();

  const std::size_t n = thetas_deg.size();
  const double nd = static_cast<double>(n_trials);
  const double dark = dark_count_prob(th);
  std::vector<double> analytic(n), expansion(n), normalized(n), cos2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(deg2rad(thetas_deg[i]));
    const double a = std::abs(alpha0 * c);
    analytic[i] = nd * detect_prob(a, th);
    expansion[i] = nd * born_expansion(a, th);
    normalized[i] = analytic[i] / nd - dark;
    cos2[i] = c * c;
  }
  const double peak = *std::max_element(normalized.begin(), normalized.end());
  if (peak > 0.0) {
    for (double& v : normalized) v /= peak;
  }

  auto h = histograms(
      n,
      [&](std::size_t i) {
        return CoherentVector::basis(alpha0 * std::cos(deg2rad(thetas_deg[i])), 1);
      },
      th, n_trials, rng);

  r.add_curve("analytic", std::move(analytic));
  r.add_curve("expansion", std::move(expansion));
  r.add_counts("counts", column(h, 1));
  r.add_curve("normalized", std::move(normalized));
  r.add_curve("cos2", std::move(cos2));
  return r;
}

ScenarioResult deviation_scan(Threshold th, const std::vector<double>& thetas_deg) {
  ScenarioResult r;
  r.name = "deviation";
  r.grid_name = "theta";
  r.grid = thetas_deg;
  r.meta = threshold_meta(1.0, th);

  const std::size_t n = thetas_deg.size();
  const double dark = dark_count_prob(th);
  const double top = detect_prob(1.0, th) - dark;
  const double quantum_top = -std::expm1(-1.0);
  std::vector<double> born(n), model(n), quantum(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(deg2rad(thetas_deg[i]));
    born[i] = c * c;
    model[i] = (detect_prob(std::abs(c), th) - dark) / top;
    quantum[i] = -std::expm1(-c * c) / quantum_top;
  }
  r.add_curve("born", std::move(born));
  r.add_curve("model", std::move(model));
  r.add_curve("quantum", std::move(quantum));
  return r;
}

ScenarioResult visibility_scan(const std::vector<double>& alphas, const std::vector<double>& gammas) {
  ScenarioResult r;
  r.name = "visibility";
  r.grid_name = "gamma";
  r.grid = gammas;
  r.meta = {{"alphas", alphas}};
  for (double a : alphas) {
    std::vector<double> v(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i) v[i] = visibility_single(a, Threshold(gammas[i]));
    char label[64];
    std::snprintf(label, sizeof label, "alpha=%g", a);
    r.add_curve(label, std::move(v));
  }
  return r;
}

// -- Dual-mode detection -------------------------------------------------------

DualModeProbs dual_mode_probs(double alpha, double theta, Threshold th) {
  const double a = std::abs(alpha);
  const double qh = detect_prob(a * std::abs(std::cos(theta)), th);
  const double qv = detect_prob(a * std::abs(std::sin(theta)), th);
  DualModeProbs p{};
  p.p0 = (1.0 - qh) * (1.0 - qv);
  p.ph = qh * (1.0 - qv);
  p.pv = (1.0 - qh) * qv;
  p.phv = qh * qv;
  const double singles = p.ph + p.pv;
  if (!(singles > 0.0)) throw UndefinedConditional("no single-detection events: P_H + P_V = 0");
  p.ph_conditional = p.ph / singles;

  const double q = detect_prob(a, th);
  const double dark = dark_count_prob(th);
  const double bright = q * (1.0 - dark);
  const double leak = (1.0 - q) * dark;
  p.visibility = (bright - leak) / (bright + leak);
  if (p.visibility > 0.0) {
    p.ph_renormalized = (p.ph_conditional - 0.5) / p.visibility + 0.5;
  } else {
    p.ph_renormalized = NAN;
  }
  return p;
}

ScenarioResult born_again_scan(double alpha, Threshold th, const std::vector<double>& thetas_deg,
                               std::int64_t n_trials, const RngStream& rng) {
  ScenarioResult r;
  r.name = "born-again";
  r.grid_name = "theta";
  r.grid = thetas_deg;
  r.meta = threshold_meta(alpha, th);

  const std::size_t n = thetas_deg.size();
  std::vector<double> p0(n), ph(n), pv(n), phv(n), cond(n), renorm(n), born(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = deg2rad(thetas_deg[i]);
    const auto p = dual_mode_probs(alpha, t, th);
    p0[i] = p.p0;
    ph[i] = p.ph;
    pv[i] = p.pv;
    phv[i] = p.phv;
    cond[i] = p.ph_conditional;
    renorm[i] = p.ph_renormalized;
    born[i] = std::cos(t) * std::cos(t);
  }
  r.meta["visibility"] = dual_mode_probs(alpha, 0.0, th).visibility;
  r.add_curve("P0", std::move(p0));
  r.add_curve("PH", std::move(ph));
  r.add_curve("PV", std::move(pv));
  r.add_curve("PHV", std::move(phv));
  r.add_curve("pH", std::move(cond));
  r.add_curve("pH_renorm", std::move(renorm));
  r.add_curve("cos2", std::move(born));

  if (n_trials > 0) {
    r.meta["N"] = n_trials;
    r.meta["seed"] = rng.seed();
    auto h = histograms(
        n,
        [&](std::size_t i) {
          const double t = deg2rad(thetas_deg[i]);
          CVector psi(2);
          psi << std::cos(t), std::sin(t);
          return CoherentVector::normalized(alpha, psi);
        },
        th, n_trials, rng);
    r.add_counts("n0", column(h, 0));
    r.add_counts("nH", column(h, 1));
    r.add_counts("nV", column(h, 2));
    r.add_counts("nHV", column(h, 3));
  }
  return r;
}

// -- Beam splitter ---------------------------------------------------------------

CoincidenceStats beamsplitter_coincidence(double alpha, Threshold th) {
  // Each output mode carries alpha / sqrt(2): q = Q_1(sqrt(2) |alpha|, 2 gamma).
  const double q = detect_prob(std::abs(alpha) / std::numbers::sqrt2, th);
  CoincidenceStats s{};
  s.p0 = (1.0 - q) * (1.0 - q);
  s.pr = (1.0 - q) * q;
  s.pd = s.pr;
  s.prd = q * q;
  if (!(s.pr > 0.0) || !(s.pd > 0.0)) {
    throw UndefinedRatio("single-count probability vanishes; coincidence ratios undefined");
  }
  s.r = s.prd / (s.pr * s.pd);
  s.rd = s.prd * (1.0 - s.p0) / (s.pr * s.pd);
  return s;
}

ScenarioResult antibunching_scan(const std::vector<double>& alphas, Threshold th,
                                 std::int64_t n_trials, const RngStream& rng) {
  ScenarioResult r;
  r.name = "antibunch";
  r.grid_name = "alpha";
  r.grid = alphas;
  r.meta = {{"gamma", th.gamma()}};

  const std::size_t n = alphas.size();
  std::vector<double> p0(n), pr(n), pd(n), prd(n), rr(n), rd(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = beamsplitter_coincidence(alphas[i], th);
    p0[i] = s.p0;
    pr[i] = s.pr;
    pd[i] = s.pd;
    prd[i] = s.prd;
    rr[i] = s.r;
    rd[i] = s.rd;
  }
  r.add_curve("P0", std::move(p0));
  r.add_curve("PR", std::move(pr));
  r.add_curve("PD", std::move(pd));
  r.add_curve("PRD", std::move(prd));
  r.add_curve("R", std::move(rr));
  r.add_curve("Rd", std::move(rd));

  if (n_trials > 0) {
    r.meta["N"] = n_trials;
    r.meta["seed"] = rng.seed();
    const UnitaryMatrix bs = gate_hadamard();
    auto h = histograms(
        n, [&](std::size_t i) { return apply(bs, CoherentVector::basis(alphas[i], 2)); }, th,
        n_trials, rng);
    r.add_counts("n0", column(h, 0));
    r.add_counts("nR", column(h, 1));
    r.add_counts("nD", column(h, 2));
    r.add_counts("nRD", column(h, 3));
  }
  return r;
}

// -- Hyperentanglement -----------------------------------------------------------

HyperentangledProbs hyperentangled_probs(double alpha, Threshold th) {
  // Each output mode carries alpha / sqrt(2): q = Q_1(sqrt(2) |alpha|, 2 gamma).
  const double q = detect_prob(std::abs(alpha) / std::numbers::sqrt2, th);
  const double dark = dark_count_prob(th);
  const double u = 1.0 - dark;
  const double v = 1.0 - q;
  HyperentangledProbs p{};
  // Grouped so that at alpha = 0 (q = dark) both products are formed from
  // the same factors in the same order and the ratio is exactly 1/4.
  p.pr_rh = u * ((u * q) * v);
  p.pr_rv = v * ((dark * u) * v);
  const double norm = 2.0 * p.pr_rh + 2.0 * p.pr_rv;
  if (!(norm > 0.0)) throw UndefinedConditional("no single-detection events");
  p.conditional_rh = p.pr_rh / norm;
  return p;
}

ScenarioResult hyperentanglement_scan(double alpha, const std::vector<double>& gammas,
                                      std::int64_t n_trials, const RngStream& rng) {
  ScenarioResult r;
  r.name = "hyper";
  r.grid_name = "gamma";
  r.grid = gammas;
  r.meta = {{"alpha", alpha}};

  const std::size_t n = gammas.size();
  std::vector<double> rh(n), rv(n), cond(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = hyperentangled_probs(alpha, Threshold(gammas[i]));
    rh[i] = p.pr_rh;
    rv[i] = p.pr_rv;
    cond[i] = p.conditional_rh;
  }
  r.add_curve("prRH", std::move(rh));
  r.add_curve("prRV", std::move(rv));
  r.add_curve("conditional_RH", std::move(cond));

  if (n_trials > 0) {
    r.meta["N"] = n_trials;
    r.meta["seed"] = rng.seed();
    const UnitaryMatrix u = hyper_circuit();
    const CoherentVector out = apply(u, CoherentVector::basis(alpha, 4));
    std::vector<std::vector<std::uint64_t>> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = simulate_outcomes(out, Threshold(gammas[i]), static_cast<std::uint64_t>(n_trials),
                               rng.substream(i));
    }
    r.add_counts("nRH", column(h, 1));
    r.add_counts("nRV", column(h, 2));
    r.add_counts("nDH", column(h, 4));
    r.add_counts("nDV", column(h, 8));
  }
  return r;
}

// -- Mach-Zehnder ----------------------------------------------------------------

namespace {

// Click probabilities of the two output ports, whose fields are
// alpha (1 + e^{i phi}) / 2 and alpha (1 - e^{i phi}) / 2. Both moduli are
// taken as cosines, sin(phi/2) = cos(pi/2 - phi/2), so at phi = pi/2 the
// arguments are the same double and the ports tie exactly.
std::pair<double, double> mz_port_probs(double alpha, double phi, Threshold th) {
  const double a = std::abs(alpha);
  const double half = 0.5 * phi;
  const double qa = marcum_q1(2.0 * a * std::abs(std::cos(half)), 2.0 * th.gamma());
  const double qb = marcum_q1(2.0 * a * std::abs(std::cos(std::numbers::pi / 2.0 - half)), 2.0 * th.gamma());
  return {qa, qb};
}

}  // namespace

double mach_zehnder_conditional(double alpha, double phi, Threshold th) {
  const auto [qa, qb] = mz_port_probs(alpha, phi, th);
  const double num = qa * (1.0 - qb);
  const double den = num + qb * (1.0 - qa);
  if (!(den > 0.0)) throw UndefinedConditional("no single-detection events");
  return num / den;
}

double mach_zehnder_any_click(double alpha, double phi, Threshold th) {
  const auto [qa, qb] = mz_port_probs(alpha, phi, th);
  return 1.0 - (1.0 - qa) * (1.0 - qb);
}

double delayed_choice_any_click(double alpha, double /*phi*/, Threshold th) {
  const double q = detect_prob(std::abs(alpha) / std::numbers::sqrt2, th);
  return 1.0 - (1.0 - q) * (1.0 - q);
}

ScenarioResult mach_zehnder(double alpha, Threshold th, const std::vector<double>& phis,
                            std::int64_t n_trials, const RngStream& rng) {
  ScenarioResult r;
  r.name = "mz";
  r.grid_name = "phi";
  r.grid = phis;
  r.meta = threshold_meta(alpha, th);

  const std::size_t n = phis.size();
  std::vector<double> pmz(n), cos2(n), pdc(n), big_mz(n), big_dc(n), ratio(n), ww(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = phis[i];
    pmz[i] = mach_zehnder_conditional(alpha, phi, th);
    cos2[i] = std::cos(phi / 2.0) * std::cos(phi / 2.0);
    pdc[i] = conditional_mode_probs(apply(delayed_choice_circuit(phi), CoherentVector::basis(alpha, 2)),
                                    th)[0];
    big_mz[i] = mach_zehnder_any_click(alpha, phi, th);
    big_dc[i] = delayed_choice_any_click(alpha, phi, th);
    ratio[i] = big_mz[i] / big_dc[i];
    ww[i] = conditional_mode_probs(apply(which_way_circuit(phi), CoherentVector::basis(alpha, 4)),
                                   th)[0];
  }
  r.add_curve("p_mz", std::move(pmz));
  r.add_curve("cos2", std::move(cos2));
  r.add_curve("p_dc", std::move(pdc));
  r.add_curve("P_MZ", std::move(big_mz));
  r.add_curve("P_DC", std::move(big_dc));
  r.add_curve("ratio", std::move(ratio));
  r.add_curve("which_way", std::move(ww));

  if (n_trials > 0) {
    r.meta["N"] = n_trials;
    r.meta["seed"] = rng.seed();
    auto h = histograms(
        n, [&](std::size_t i) { return apply(mz_circuit(phis[i]), CoherentVector::basis(alpha, 2)); },
        th, n_trials, rng);
    r.add_counts("n0", column(h, 0));
    r.add_counts("nR", column(h, 1));
    r.add_counts("nD", column(h, 2));
    r.add_counts("nRD", column(h, 3));
  }
  return r;
}

MachZehnderFit mach_zehnder_fit(double alpha, Threshold th, int n_points, double sample_sd,
                                const RngStream& rng) {
  if (n_points < 3) throw InvalidDimension("fit needs at least three phase points");
  MachZehnderFit f;
  f.phis = linspace(0.0, 2.0 * kPi, n_points);
  f.samples.resize(n_points);
  RngStream stream = rng;
  for (int j = 0; j < n_points; j += 2) {
    const auto [x, y] = stream.normal_pair();
    f.samples[j] = mach_zehnder_conditional(alpha, f.phis[j], th) + sample_sd * x;
    if (j + 1 < n_points) {
      f.samples[j + 1] = mach_zehnder_conditional(alpha, f.phis[j + 1], th) + sample_sd * y;
    }
  }

  // A cos^2(phi/2 + phi0) + B = (B + A/2) + (A/2) cos(2 phi0) cos(phi) - (A/2) sin(2 phi0) sin(phi),
  // so the fit is linear in (c0, c1, c2) over the basis {1, cos phi, sin phi}.
  const double dark = dark_count_prob(th);
  Eigen::MatrixXd design(n_points, 3);
  Eigen::VectorXd y(n_points);
  for (int j = 0; j < n_points; ++j) {
    design(j, 0) = 1.0;
    design(j, 1) = std::cos(f.phis[j]);
    design(j, 2) = std::sin(f.phis[j]);
    y(j) = f.samples[j] - dark;
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(y);
  const double half_amp = std::hypot(c(1), c(2));
  f.amplitude = 2.0 * half_amp;
  f.offset = c(0) - half_amp;
  f.phase = 0.5 * std::atan2(-c(2), c(1));
  f.cosine_visibility = f.amplitude / (f.amplitude + 2.0 * f.offset);

  f.fitted.resize(n_points);
  double sq = 0.0;
  for (int j = 0; j < n_points; ++j) {
    const double cf = std::cos(f.phis[j] / 2.0 + f.phase);
    f.fitted[j] = f.amplitude * cf * cf + f.offset;
    const double ideal = std::cos(f.phis[j] / 2.0);
    sq += (f.samples[j] - ideal * ideal) * (f.samples[j] - ideal * ideal);
  }
  f.rmse = std::sqrt(sq / n_points);

  const double phi_max = -2.0 * f.phase;
  const double hi = mach_zehnder_conditional(alpha, phi_max, th) - dark;
  const double lo = mach_zehnder_conditional(alpha, phi_max + kPi, th) - dark;
  f.visibility = (hi - lo) / (hi + lo);
  f.rd = beamsplitter_coincidence(alpha, th).rd;
  return f;
}

// -- General conditional law -----------------------------------------------------

std::vector<double> conditional_mode_probs(const CoherentVector& state, Threshold th) {
  std::vector<double> r = crossing_odds(state, th);
  double total = 0.0;
  for (double v : r) {
    if (std::isinf(v)) throw SaturatedDetector("a mode crosses the threshold with probability 1");
    total += v;
  }
  if (!(total > 0.0)) throw UndefinedConditional("no single-detection events");
  for (double& v : r) v /= total;
  return r;
}

}  // namespace bornsim
