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

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bornsim/experiments.hpp"
#include "bornsim/tomography.hpp"

namespace bornsim {

/// A rectangular table of named numeric columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are
/// enclosed in quotes with embedded quotes doubled.
std::string csv_field(const std::string& s);

/// Shortest decimal form that parses back to the same double; "nan",
/// "inf" and "-inf" for the non-finite values.
std::string format_number(double v);

/// Header row then one row per record, CRLF line endings.
void write_csv(std::ostream& out, const Table& t);

Table to_table(const ScenarioResult& r);
Table to_table(const std::vector<SweepPoint>& sweep);

nlohmann::json to_json(const ScenarioResult& r);
nlohmann::json to_json(const std::vector<SweepPoint>& sweep, bool with_members = true);
nlohmann::json to_json(const Table& t);

}  // namespace bornsim
