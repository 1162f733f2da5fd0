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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bornsim/io.hpp"

using namespace bornsim;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("bornsim_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bornsim");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      out.push_back(cur);
      cur.clear();
      ++i;
    } else {
      cur += text[i];
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

TEST(GridSpec, ParsesRangesAndSingles) {
  const auto g = cli::GridSpec::parse("0:0.1:3");
  const auto v = g.values();
  ASSERT_EQ(v.size(), 31u);
  EXPECT_DOUBLE_EQ(v.back(), 3.0);
  EXPECT_EQ(cli::GridSpec::parse("1.5").values(), std::vector<double>{1.5});
  EXPECT_EQ(cli::GridSpec::parse("0.05:0.05:3").values().size(), 60u);
}

TEST(GridSpec, RejectsMalformed) {
  for (const char* bad : {"", "a:b:c", "1:0:2", "2:1:1", "1:-1:2", "0:1", "0:1:2:3", "nan"}) {
    EXPECT_THROW(cli::GridSpec::parse(bad), cli::UsageError) << bad;
  }
}

TEST(Csv, QuotesAndNumbers) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  std::ostringstream os;
  write_csv(os, Table{{"x", "y,z"}, {{1.0, 2.5}}});
  EXPECT_EQ(os.str(), "x,\"y,z\"\r\n1,2.5\r\n");
}

TEST(Commands, CountsTable) {
  TempDir dir;
  ASSERT_EQ(run_cli({"counts", "--out-dir", dir.str(), "--seed", "7"}), 0);
  const auto rows = lines(slurp(dir.path() / "counts-7.csv"));
  ASSERT_EQ(rows.size(), 182u);
  EXPECT_EQ(rows[0].rfind("theta,analytic,expansion,counts", 0), 0u) << rows[0];
  EXPECT_TRUE(fs::exists(dir.path() / "counts-7.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir.path() / "counts-7.manifest.json"));
  EXPECT_EQ(manifest["config"]["seed"], 7);
  EXPECT_EQ(manifest["config"]["n"], 10000);
  EXPECT_TRUE(manifest.contains("version"));
  EXPECT_TRUE(manifest.contains("wall_time_s"));
}

TEST(Commands, SameSeedSameBytes) {
  TempDir a, b;
  ASSERT_EQ(run_cli({"antibunch", "--out-dir", a.str(), "--seed", "3", "--threads", "1", "--n", "20000"}), 0);
  ASSERT_EQ(run_cli({"antibunch", "--out-dir", b.str(), "--seed", "3", "--threads", "3", "--n", "20000"}), 0);
  EXPECT_EQ(slurp(a.path() / "antibunch-3.csv"), slurp(b.path() / "antibunch-3.csv"));
  TempDir c;
  ASSERT_EQ(run_cli({"antibunch", "--out-dir", c.str(), "--seed", "4", "--n", "20000"}), 0);
  EXPECT_NE(slurp(a.path() / "antibunch-3.csv"), slurp(c.path() / "antibunch-4.csv"));
}

TEST(Commands, FlagsOverrideConfig) {
  TempDir dir;
  {
    std::ofstream cfg(dir.path() / "cfg.json");
    cfg << R"({"alpha": 0.4, "gamma": 1.2, "seed": 9, "format": "csv"})";
  }
  ASSERT_EQ(run_cli({"born-again", "--config", (dir.path() / "cfg.json").string(), "--gamma", "0.8", "--out-dir",
                     dir.str()}),
            0);
  const auto manifest = nlohmann::json::parse(slurp(dir.path() / "born-again-9.manifest.json"));
  EXPECT_DOUBLE_EQ(manifest["config"]["alpha"].get<double>(), 0.4);
  EXPECT_DOUBLE_EQ(manifest["config"]["gamma"].get<double>(), 0.8);
  EXPECT_FALSE(fs::exists(dir.path() / "born-again-9.json"));
}

TEST(Commands, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run_cli({"nonsense"}), 2);
  EXPECT_EQ(run_cli({"counts", "--alpha-grid", "1:0:2", "--out-dir", dir.str()}), 2);
  EXPECT_EQ(run_cli({"counts", "--format", "xml", "--out-dir", dir.str()}), 2);
  {
    std::ofstream cfg(dir.path() / "bad.json");
    cfg << R"({"colour": 1})";
  }
  EXPECT_EQ(run_cli({"counts", "--config", (dir.path() / "bad.json").string(), "--out-dir", dir.str()}), 2);
  // gamma = 0: every detector fires, so the conditional probability is undefined.
  EXPECT_EQ(run_cli({"hyper", "--gamma-grid", "0:1:0", "--out-dir", dir.str()}), 1);
}

TEST(Commands, WitnessColumns) {
  TempDir dir;
  ASSERT_EQ(run_cli({"witness", "--alpha-grid", "0.5:0.5:1.5", "--out-dir", dir.str(), "--format", "csv"}), 0);
  const auto rows = lines(slurp(dir.path() / "witness-42.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "alpha,witness_mle,witness_linear,fidelity_mle,fidelity_linear");
}

TEST(Commands, FastContour) {
  TempDir dir;
  ASSERT_EQ(run_cli({"fidelity-contour", "--fast", "--alpha-grid", "1:0.2:1.4", "--gamma-grid", "1.4:0.2:1.6",
                     "--out-dir", dir.str()}),
            0);
  const auto rows = lines(slurp(dir.path() / "fidelity-contour-42.csv"));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], "alpha,gamma,mean_fidelity,frac_invalid,mean_visibility,mean_ppt_witness");
  const auto j = nlohmann::json::parse(slurp(dir.path() / "fidelity-contour-42.manifest.json"));
  EXPECT_EQ(j["config"]["fast"], true);
}

TEST(Commands, CircuitFromFile) {
  TempDir dir;
  const auto path = dir.path() / "mz.json";
  {
    std::ofstream f(path);
    f << R"({"modes": 2, "gates": [{"gate": "H", "wires": [0]}, {"gate": "H", "wires": [0]}]})";
  }
  ASSERT_EQ(run_cli({"circuit", "--circuit", path.string(), "--alpha", "1", "--out-dir", dir.str(), "--format",
                     "csv", "--n", "1000"}),
            0);
  const auto rows = lines(slurp(dir.path() / "circuit-42.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "mode,q,conditional,single_counts,click_counts");
  EXPECT_EQ(run_cli({"circuit", "--out-dir", dir.str()}), 2);
}

TEST(Commands, EveryCommandHasDefaults) {
  for (const auto& c : cli::commands()) {
    const auto cfg = cli::defaults_for(c);
    EXPECT_EQ(cfg.command, c);
  }
  EXPECT_THROW(cli::defaults_for("bogus"), cli::UsageError);
}
