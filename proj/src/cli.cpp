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

#include "bornsim/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "bornsim/detection.hpp"
#include "bornsim/error.hpp"
#include "bornsim/experiments.hpp"
#include "bornsim/io.hpp"
#include "bornsim/optics.hpp"
#include "bornsim/parallel.hpp"
#include "bornsim/tomography.hpp"

namespace bornsim::cli {

namespace {

constexpr int kFastStates = 20;

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kJson: return "json";
    default: return "both";
  }
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  if (s == "both") return OutputFormat::kBoth;
  throw UsageError("format must be csv, json or both");
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw UsageError("not a number: '" + s + "'");
  return v;
}

CVector bell_direction() {
  CVector psi = CVector::Zero(4);
  psi(0) = std::numbers::sqrt2 / 2.0;
  psi(3) = std::numbers::sqrt2 / 2.0;
  return psi;
}

// What one command produces: the main table plus any side tables.
struct Output {
  Table table;
  nlohmann::json json;
  std::vector<std::pair<std::string, Table>> extra;
};

Output from_scenario(const ScenarioResult& r) { return {to_table(r), to_json(r), {}}; }

int member_states(const RunConfig& c, int standard_states) {
  if (c.n_states > 0) return c.n_states;
  return c.fast ? std::min(kFastStates, standard_states) : standard_states;
}

Output run_counts(const RunConfig& c) {
  return from_scenario(polarization_scan(c.alpha, Threshold(c.gamma), c.theta_grid.values(), c.n_trials,
                                         RngStream(c.seed, 0)));
}

Output run_born_again(const RunConfig& c) {
  return from_scenario(born_again_scan(c.alpha, Threshold(c.gamma), c.theta_grid.values(), c.n_trials,
                                       RngStream(c.seed, 0)));
}

Output run_antibunch(const RunConfig& c) {
  return from_scenario(antibunching_scan(c.alpha_grid.values(), Threshold(c.gamma), c.n_trials,
                                         RngStream(c.seed, 0)));
}

Output run_hyper(const RunConfig& c) {
  return from_scenario(hyperentanglement_scan(c.alpha, c.gamma_grid.values(), c.n_trials,
                                              RngStream(c.seed, 0)));
}

Output run_mz(const RunConfig& c) {
  const Threshold th(c.gamma);
  Output out = from_scenario(mach_zehnder(c.alpha, th, linspace(0.0, 2.0 * std::numbers::pi, c.phi_points),
                                          c.n_trials, RngStream(c.seed, 0)));
  const auto fit = mach_zehnder_fit(c.alpha, th, c.fit_points, 1.0 / std::sqrt(kPhotonsPerSample),
                                    RngStream(c.seed, 1));
  Table t{{"phi", "sample", "fitted", "cos2"}, {}};
  for (std::size_t j = 0; j < fit.phis.size(); ++j) {
    const double h = std::cos(fit.phis[j] / 2.0);
    t.rows.push_back({fit.phis[j], fit.samples[j], fit.fitted[j], h * h});
  }
  out.json["fit"] = {{"points", c.fit_points},     {"amplitude", fit.amplitude},
                     {"offset", fit.offset},       {"phase", fit.phase},
                     {"visibility", fit.visibility}, {"cosine_visibility", fit.cosine_visibility},
                     {"rd", fit.rd},               {"rmse", fit.rmse}};
  out.extra.emplace_back("fit", std::move(t));
  return out;
}

Output run_fidelity(const RunConfig& c, TomographyMethod method) {
  EnsembleOptions opts;
  opts.d = c.d;
  opts.method = method;
  opts.n_states = member_states(c, method == TomographyMethod::kLinear ? 30 : 5);
  const auto alphas = c.alpha_grid.values();
  const auto sweep = ensemble_sweep(alphas, {c.gamma}, opts, RngStream(c.seed, 0));

  Output out;
  out.table.columns = {"alpha"};
  const bool bell = method == TomographyMethod::kMle && c.d == 4;
  if (bell) out.table.columns.push_back("bell");
  out.table.columns.push_back("mean_fidelity");
  out.table.columns.push_back("frac_invalid");
  for (int j = 0; j < opts.n_states; ++j) out.table.columns.push_back("state_" + std::to_string(j));

  const HermitianBasis basis = HermitianBasis::build(c.d);
  nlohmann::json bell_json = nlohmann::json::array();
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto& p = sweep[i];
    std::vector<double> row{p.alpha};
    if (bell) {
      const auto rep = tomograph(CoherentVector(p.alpha, bell_direction()), Threshold(c.gamma), basis,
                                 TomographyMethod::kMle);
      row.push_back(rep.fidelity);
      bell_json.push_back({{"alpha", p.alpha}, {"fidelity", rep.fidelity}});
    }
    row.push_back(p.mean_fidelity);
    row.push_back(p.frac_invalid);
    for (const auto& m : p.members) row.push_back(m.fidelity);
    out.table.rows.push_back(std::move(row));
  }
  out.json = {{"method", bornsim::to_string(method)},
              {"d", c.d},
              {"gamma", c.gamma},
              {"n_states", opts.n_states},
              {"sweep", to_json(sweep)}};
  if (bell) out.json["bell"] = bell_json;
  return out;
}

Output run_witness(const RunConfig& c) {
  const HermitianBasis basis = HermitianBasis::build(4);
  const Threshold th(c.gamma);
  Output out;
  out.table.columns = {"alpha", "witness_mle", "witness_linear", "fidelity_mle", "fidelity_linear"};
  for (double a : c.alpha_grid.values()) {
    const CoherentVector state(a, bell_direction());
    const auto mle = tomograph(state, th, basis, TomographyMethod::kMle, 2, 2);
    const auto lin = tomograph(state, th, basis, TomographyMethod::kLinear, 2, 2);
    out.table.rows.push_back(
        {a, *mle.ppt_min_eigenvalue, *lin.ppt_min_eigenvalue, mle.fidelity, lin.fidelity});
  }
  out.json = {{"gamma", c.gamma}, {"table", to_json(out.table)}};
  return out;
}

Output run_fidelity_contour(const RunConfig& c) {
  EnsembleOptions opts;
  opts.d = c.d;
  opts.method = TomographyMethod::kMle;
  opts.n_states = member_states(c, 100);
  const auto sweep = ensemble_sweep(c.alpha_grid.values(), c.gamma_grid.values(), opts, RngStream(c.seed, 0));
  Output out{to_table(sweep), nlohmann::json::object(), {}};
  const auto best = std::max_element(sweep.begin(), sweep.end(), [](const auto& x, const auto& y) {
    return x.mean_fidelity < y.mean_fidelity;
  });
  out.json = {{"d", c.d}, {"n_states", opts.n_states}, {"method", "mle"}, {"sweep", to_json(sweep)}};
  if (best != sweep.end()) {
    out.json["maximum"] = {{"alpha", best->alpha},
                           {"gamma", best->gamma},
                           {"mean_fidelity", best->mean_fidelity},
                           {"mean_visibility", best->mean_visibility}};
  }
  return out;
}

Output run_visibility_contour(const RunConfig& c) {
  Output out;
  out.table.columns = {"alpha", "gamma", "visibility"};
  for (double a : c.alpha_grid.values()) {
    for (double g : c.gamma_grid.values()) out.table.rows.push_back({a, g, ensemble_visibility(a, Threshold(g))});
  }
  out.json = {{"table", to_json(out.table)}};
  return out;
}

Output run_circuit(const RunConfig& c) {
  if (c.circuit.empty()) throw UsageError("circuit command needs --circuit FILE");
  std::ifstream in(c.circuit);
  if (!in) throw UsageError("cannot open circuit file '" + c.circuit + "'");
  nlohmann::json spec;
  try {
    in >> spec;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("circuit file is not valid JSON: ") + e.what());
  }
  const Circuit circuit = Circuit::from_json(spec);
  const UnitaryMatrix u = circuit.unitary();
  const Threshold th(c.gamma);
  const CoherentVector input = CoherentVector::basis(c.alpha, circuit.d());
  const CoherentVector output = apply(u, input);
  const auto q = mode_crossing_probs(output, th);
  const auto p = conditional_mode_probs(output, th);

  std::vector<std::uint64_t> hist;
  if (c.n_trials > 0) {
    hist = simulate_outcomes(input, u, th, static_cast<std::uint64_t>(c.n_trials), RngStream(c.seed, 0),
                             NoiseMode::kFresh);
  }
  Output out;
  out.table.columns = {"mode", "q", "conditional", "single_counts", "click_counts"};
  for (int i = 0; i < circuit.d(); ++i) {
    double single = 0.0, clicks = 0.0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
      if ((k >> i) & 1U) {
        clicks += static_cast<double>(hist[k]);
        if (k == (std::size_t{1} << i)) single += static_cast<double>(hist[k]);
      }
    }
    out.table.rows.push_back({static_cast<double>(i), q[i], p[i], single, clicks});
  }
  out.json = {{"circuit", circuit.to_json()}, {"alpha", c.alpha}, {"gamma", c.gamma},
              {"table", to_json(out.table)}};
  return out;
}

Output dispatch(const RunConfig& c) {
  const auto& cmd = c.command;
  if (cmd == "counts") return run_counts(c);
  if (cmd == "deviation") return from_scenario(deviation_scan(Threshold(c.gamma), c.theta_grid.values()));
  if (cmd == "visibility") return from_scenario(visibility_scan(c.alphas, c.gamma_grid.values()));
  if (cmd == "born-again") return run_born_again(c);
  if (cmd == "antibunch") return run_antibunch(c);
  if (cmd == "hyper") return run_hyper(c);
  if (cmd == "mz") return run_mz(c);
  if (cmd == "fidelity") return run_fidelity(c, TomographyMethod::kLinear);
  if (cmd == "fidelity-mle") return run_fidelity(c, TomographyMethod::kMle);
  if (cmd == "witness") return run_witness(c);
  if (cmd == "fidelity-contour") return run_fidelity_contour(c);
  if (cmd == "visibility-contour") return run_visibility_contour(c);
  if (cmd == "circuit") return run_circuit(c);
  throw UsageError("unknown command '" + cmd + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

std::string csv_text(const Table& t) {
  std::ostringstream s;
  write_csv(s, t);
  return s.str();
}

}  // namespace

// -- GridSpec ------------------------------------------------------------------------

GridSpec GridSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (!text.empty() && text.back() == ':') parts.push_back("");
  GridSpec g;
  if (parts.size() == 1) {
    g.min = g.max = parse_number(parts[0]);
    g.step = 1.0;
  } else if (parts.size() == 3) {
    g.min = parse_number(parts[0]);
    g.step = parse_number(parts[1]);
    g.max = parse_number(parts[2]);
  } else {
    throw UsageError("grid must be min:step:max, got '" + text + "'");
  }
  if (!(g.step > 0.0)) throw UsageError("grid step must be positive in '" + text + "'");
  if (!(g.min <= g.max)) throw UsageError("grid min exceeds max in '" + text + "'");
  if ((g.max - g.min) / g.step > 1e6) throw UsageError("grid has too many points: '" + text + "'");
  return g;
}

std::vector<double> GridSpec::values() const {
  // Tolerate round-off so that 0:0.1:3 includes 3.
  const auto n = static_cast<int>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = min + step * i;
  return v;
}

std::string GridSpec::str() const {
  return format_number(min) + ":" + format_number(step) + ":" + format_number(max);
}

// -- RunConfig -----------------------------------------------------------------------

nlohmann::json RunConfig::to_json() const {
  return {{"command", command},
          {"alpha", alpha},
          {"gamma", gamma},
          {"alpha_grid", alpha_grid.str()},
          {"gamma_grid", gamma_grid.str()},
          {"theta_grid", theta_grid.str()},
          {"alphas", alphas},
          {"phi_points", phi_points},
          {"fit_points", fit_points},
          {"d", d},
          {"n", n_trials},
          {"n_states", n_states},
          {"seed", seed},
          {"threads", threads},
          {"fast", fast},
          {"out_dir", out_dir},
          {"format", to_string(format)},
          {"circuit", circuit}};
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{
      "counts",       "deviation", "visibility", "born-again",       "antibunch",          "hyper", "mz",
      "fidelity",     "fidelity-mle", "witness", "fidelity-contour", "visibility-contour", "circuit"};
  return names;
}

RunConfig defaults_for(const std::string& command) {
  const auto& known = commands();
  if (std::find(known.begin(), known.end(), command) == known.end()) {
    throw UsageError("unknown command '" + command + "'");
  }
  RunConfig c;
  c.command = command;
  c.alpha_grid = GridSpec::parse("0:0.1:3");
  c.gamma_grid = GridSpec::parse("0.05:0.05:3");
  if (command == "counts") {
    c.alpha = 0.707;
  } else if (command == "deviation") {
    c.alpha = 1.0;
  } else if (command == "visibility") {
    c.alphas = {0.5, 1.0, 1.5};
  } else if (command == "born-again") {
    c.alpha = std::sqrt(0.5);
  } else if (command == "antibunch") {
    c.alpha_grid = GridSpec::parse("0:0.02:3");
  } else if (command == "hyper") {
    c.alpha = 1.0;
  } else if (command == "mz") {
    c.alpha = 0.95;
    c.gamma = 1.6;
  } else if (command == "fidelity-contour" || command == "visibility-contour") {
    c.gamma_grid = GridSpec::parse("0.5:0.1:2.5");
  } else if (command == "circuit") {
    c.alpha = 1.0;
  }
  return c;
}

void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") {
        // The command comes from the command line.
      } else if (key == "alpha" || key == "alpha0") {
        c.alpha = v.get<double>();
      } else if (key == "gamma") {
        c.gamma = v.get<double>();
      } else if (key == "alpha_grid") {
        c.alpha_grid = GridSpec::parse(v.get<std::string>());
      } else if (key == "gamma_grid") {
        c.gamma_grid = GridSpec::parse(v.get<std::string>());
      } else if (key == "theta_grid") {
        c.theta_grid = GridSpec::parse(v.get<std::string>());
      } else if (key == "alphas") {
        c.alphas = v.get<std::vector<double>>();
      } else if (key == "phi_points") {
        c.phi_points = v.get<int>();
      } else if (key == "fit_points") {
        c.fit_points = v.get<int>();
      } else if (key == "d") {
        c.d = v.get<int>();
      } else if (key == "n") {
        c.n_trials = v.get<std::int64_t>();
      } else if (key == "n_states") {
        c.n_states = v.get<int>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "threads") {
        c.threads = v.get<int>();
      } else if (key == "fast") {
        c.fast = v.get<bool>();
      } else if (key == "out_dir") {
        c.out_dir = v.get<std::string>();
      } else if (key == "format") {
        c.format = parse_format(v.get<std::string>());
      } else if (key == "circuit") {
        c.circuit = v.get<std::string>();
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

int run(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  if (c.threads > 0) set_thread_count(c.threads);
  Output out;
  try {
    out = dispatch(c);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    std::cerr << "bornsim " << c.command << ": " << e.what() << "\n";
    return 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  try {
    const std::filesystem::path dir(c.out_dir);
    std::filesystem::create_directories(dir);
    const std::string stem = c.command + "-" + std::to_string(c.seed);
    std::vector<std::string> files;
    auto emit = [&](const std::string& name, const std::string& text) {
      write_text(dir / name, text);
      files.push_back(name);
    };
    const bool csv = c.format != OutputFormat::kJson;
    const bool json = c.format != OutputFormat::kCsv;
    if (csv) {
      emit(stem + ".csv", csv_text(out.table));
      for (const auto& [suffix, t] : out.extra) emit(c.command + "-" + suffix + "-" + std::to_string(c.seed) + ".csv", csv_text(t));
    }
    if (json) {
      nlohmann::json doc = out.json;
      doc["command"] = c.command;
      emit(stem + ".json", doc.dump(2) + "\n");
    }
    nlohmann::json manifest{{"config", c.to_json()},
                            {"version", BORNSIM_VERSION},
                            {"wall_time_s", wall},
                            {"threads", thread_count()},
                            {"files", files}};
    write_text(dir / (stem + ".manifest.json"), manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "bornsim " << c.command << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int main(int argc, char** argv) {
  CLI::App app{"bornsim: threshold-detection model of linear optics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BORNSIM_VERSION);

  std::optional<double> alpha, gamma;
  std::optional<std::string> alpha_grid, gamma_grid, theta_grid, format, out_dir, config, circuit;
  std::optional<std::vector<double>> alphas;
  std::optional<int> phi_points, fit_points, d, n_states, threads;
  std::optional<std::int64_t> n_trials;
  std::optional<std::uint64_t> seed;
  bool fast = false;

  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--alpha,--alpha0", alpha, "coherent amplitude |alpha|");
    sub->add_option("--gamma", gamma, "detection threshold");
    sub->add_option("--alpha-grid", alpha_grid, "alpha grid min:step:max");
    sub->add_option("--gamma-grid", gamma_grid, "gamma grid min:step:max");
    sub->add_option("--theta-grid", theta_grid, "polarizer angle grid in degrees");
    sub->add_option("--alphas", alphas, "amplitudes for the visibility curves")->delimiter(',');
    sub->add_option("--phi-points", phi_points, "phase points over [0, 2 pi]");
    sub->add_option("--fit-points", fit_points, "phase points in the fitted-sample analysis");
    sub->add_option("--d", d, "mode count for tomography");
    sub->add_option("--n", n_trials, "Monte Carlo realizations per grid point");
    sub->add_option("--n-states", n_states, "Haar ensemble size");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--threads", threads, "worker threads (default: BORNSIM_THREADS or all cores)");
    sub->add_flag("--fast", fast, "20-state ensembles");
    sub->add_option("--config", config, "JSON config file (flags take precedence)");
    sub->add_option("--out-dir", out_dir, "output directory");
    sub->add_option("--format", format, "csv, json or both");
    sub->add_option("--circuit", circuit, "circuit JSON file (circuit command)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    RunConfig cfg = defaults_for(command);
    if (config) {
      std::ifstream in(*config);
      if (!in) throw UsageError("cannot open config file '" + *config + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config file is not valid JSON: ") + e.what());
      }
      apply_json(cfg, j);
    }
    if (alpha) cfg.alpha = *alpha;
    if (gamma) cfg.gamma = *gamma;
    if (alpha_grid) cfg.alpha_grid = GridSpec::parse(*alpha_grid);
    if (gamma_grid) cfg.gamma_grid = GridSpec::parse(*gamma_grid);
    if (theta_grid) cfg.theta_grid = GridSpec::parse(*theta_grid);
    if (alphas) cfg.alphas = *alphas;
    if (phi_points) cfg.phi_points = *phi_points;
    if (fit_points) cfg.fit_points = *fit_points;
    if (d) cfg.d = *d;
    if (n_trials) cfg.n_trials = *n_trials;
    if (n_states) cfg.n_states = *n_states;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (fast) cfg.fast = true;
    if (out_dir) cfg.out_dir = *out_dir;
    if (format) cfg.format = parse_format(*format);
    if (circuit) cfg.circuit = *circuit;

    if (cfg.n_trials < 0) throw UsageError("--n must be nonnegative");
    if (cfg.command == "counts" && cfg.n_trials < 1) throw UsageError("counts needs --n >= 1");
    if (cfg.phi_points < 1 || cfg.fit_points < 3) throw UsageError("too few phase points");
    if (cfg.gamma < 0.0 || !std::isfinite(cfg.gamma)) throw UsageError("--gamma must be nonnegative");
    if (cfg.threads < 0) throw UsageError("--threads must be nonnegative");
    return run(cfg);
  } catch (const UsageError& e) {
    std::cerr << "bornsim: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace bornsim::cli
