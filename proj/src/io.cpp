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

#include "bornsim/io.hpp"

#include <charconv>
#include <cmath>
#include <functional>

namespace bornsim {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out << ',';
    out << csv_field(t.columns[c]);
  }
  out << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_number(row[c]);
    }
    out << "\r\n";
  }
}

Table to_table(const ScenarioResult& r) {
  Table t;
  t.columns.push_back(r.grid_name);
  std::vector<std::function<double(std::size_t)>> cells;
  for (const auto& [name, is_count] : r.order) {
    t.columns.push_back(name);
    if (is_count) {
      const auto& v = r.count(name);
      cells.push_back([&v](std::size_t i) { return static_cast<double>(v[i]); });
    } else {
      const auto& v = r.curve(name);
      cells.push_back([&v](std::size_t i) { return v[i]; });
    }
  }
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    std::vector<double> row{r.grid[i]};
    for (const auto& cell : cells) row.push_back(cell(i));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(const std::vector<SweepPoint>& sweep) {
  Table t{{"alpha", "gamma", "mean_fidelity", "frac_invalid", "mean_visibility", "mean_ppt_witness"}, {}};
  for (const auto& p : sweep) {
    t.rows.push_back({p.alpha, p.gamma, p.mean_fidelity, p.frac_invalid, p.mean_visibility,
                      p.mean_ppt_witness});
  }
  return t;
}

namespace {

// JSON has no NaN or infinity; those become null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json nums(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

nlohmann::json to_json(const ScenarioResult& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["meta"] = r.meta;
  j["grid"] = {{"name", r.grid_name}, {"values", nums(r.grid)}};
  j["analytic"] = nlohmann::json::object();
  for (const auto& [name, v] : r.analytic) j["analytic"][name] = nums(v);
  if (!r.counts.empty()) {
    j["counts"] = nlohmann::json::object();
    for (const auto& [name, v] : r.counts) j["counts"][name] = v;
  }
  return j;
}

nlohmann::json to_json(const std::vector<SweepPoint>& sweep, bool with_members) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& p : sweep) {
    nlohmann::json e{{"alpha", p.alpha},
                     {"gamma", p.gamma},
                     {"mean_fidelity", num(p.mean_fidelity)},
                     {"frac_invalid", num(p.frac_invalid)},
                     {"mean_visibility", num(p.mean_visibility)},
                     {"mean_ppt_witness", num(p.mean_ppt_witness)}};
    if (with_members) {
      nlohmann::json members = nlohmann::json::array();
      for (const auto& m : p.members) {
        members.push_back({{"member", m.member},
                           {"fidelity", num(m.fidelity)},
                           {"min_eigenvalue", num(m.min_eigenvalue)},
                           {"linear_min_eigenvalue", num(m.linear_min_eigenvalue)},
                           {"ppt_witness", num(m.ppt_witness)},
                           {"converged", m.converged}});
      }
      e["members"] = std::move(members);
    }
    a.push_back(std::move(e));
  }
  return a;
}

nlohmann::json to_json(const Table& t) {
  nlohmann::json j{{"columns", t.columns}, {"rows", nlohmann::json::array()}};
  for (const auto& row : t.rows) j["rows"].push_back(nums(row));
  return j;
}

}  // namespace bornsim
