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

#include <nlohmann/json.hpp>

namespace bornsim::cli {

enum class OutputFormat { kCsv, kJson, kBoth };

/// Inclusive arithmetic grid written "min:step:max" (or a single value).
struct GridSpec {
  double min = 0.0;
  double step = 1.0;
  double max = 0.0;

  /// Throws UsageError unless min <= max and step > 0.
  static GridSpec parse(const std::string& text);
  std::vector<double> values() const;
  std::string str() const;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  double alpha = 0.0;
  double gamma = 1.0;
  GridSpec alpha_grid;
  GridSpec gamma_grid;
  GridSpec theta_grid{0.0, 1.0, 180.0};
  std::vector<double> alphas;      // visibility curves
  int phi_points = 181;
  int fit_points = 181;
  int d = 4;
  std::int64_t n_trials = 10000;
  int n_states = 0;
  std::uint64_t seed = 42;
  int threads = 0;                 // 0: keep BORNSIM_THREADS / hardware default
  bool fast = false;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::kBoth;
  std::string circuit;             // circuit command: path to the JSON description

  nlohmann::json to_json() const;
};

/// Command names accepted by run().
const std::vector<std::string>& commands();

/// Defaults for a command (scenario parameters).
RunConfig defaults_for(const std::string& command);

/// Overrides fields from a JSON object with snake_case keys matching the
/// flag names. Unknown keys are a UsageError.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Runs one command and writes <command>-<seed>.{csv,json} plus
/// <command>-<seed>.manifest.json into cfg.out_dir. Returns 0 on success,
/// 1 if the scenario failed (message on stderr).
int run(const RunConfig& cfg);

/// Full entry point: parses flags (CLI flags > --config file > defaults)
/// and calls run(). Usage errors return 2.
int main(int argc, char** argv);

}  // namespace bornsim::cli
