// Copyright 2026 The rwre Authors
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


#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "rwre/cli.hpp"
#include "rwre/env_io.hpp"

namespace rwre {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Outcome r;
  r.code = dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("rwre_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    save_environment(testing::constant_reflected(2.0 / 3.0, 3), path("flat3.json"));
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

TEST_F(CliTest, KappaOfTwoPoint) {
  const Outcome r = run({"kappa", "--two-point", "0.75", "0.25", "0.9"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["kappa"].get<double>(), 2.0, 1e-9);
  EXPECT_EQ(j["run_config"]["command"], "kappa");
}

TEST_F(CliTest, MomentsOfFlatFixture) {
  const Outcome r = run({"moments", "--env", path("flat3.json"), "--n", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["E"].get<double>(), 5.5, 1e-12);
  EXPECT_NEAR(j["E_lazy"].get<double>(), 11.0, 1e-12);
}

TEST_F(CliTest, GenEnvRoundTripsAndIsSeeded) {
  const Outcome a = run({"gen-env", "--two-point", "0.75", "0.25", "0.9", "--right", "50", "--seed", "4", "--reflect", "50",
                     "--out", path("e.json")});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const Outcome b = run({"gen-env", "--two-point", "0.75", "0.25", "0.9", "--right", "50", "--seed", "4", "--reflect", "50"});
  ASSERT_EQ(b.code, kExitOk);
  const Environment e = load_environment(path("e.json"));
  EXPECT_EQ(e.reflected_n(), 50);
  EXPECT_EQ(json::parse(slurp(path("e.json")))["omega"], json::parse(b.out)["omega"]);
  const Outcome m = run({"mixing-time", "--env", path("e.json"), "--n", "50"});
  EXPECT_EQ(m.code, kExitOk) << m.err;
  EXPECT_GT(json::parse(m.out)["t_mix"].get<std::int64_t>(), 50);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"kappa", "--two-point", "0.75", "0.25", "0.9", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"no-such-command"}).code, kExitUsage);
  const Outcome noseed = run({"gen-env", "--two-point", "0.75", "0.25", "0.9", "--right", "10"});
  EXPECT_EQ(noseed.code, kExitUsage);
  EXPECT_NE(noseed.err.find("seed"), std::string::npos);
  EXPECT_EQ(run({"mc-hitting", "--env", path("flat3.json"), "--n", "3"}).code, kExitUsage);
  EXPECT_EQ(run({"mc-hitting", "--env", path("flat3.json"), "--n", "3", "--seed", "1", "--replicas", "99"}).code,
            kExitUsage);
  EXPECT_EQ(run({"kappa"}).code, kExitUsage);
  EXPECT_EQ(run({"tv-profile", "--env", path("flat3.json"), "--n", "3"}).code, kExitUsage);
  EXPECT_EQ(run({"kappa", "--two-point", "1.5", "0.25", "0.9"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(CliTest, PreconditionsExitThree) {
  EXPECT_EQ(run({"moments", "--env", path("flat3.json"), "--n", "5"}).code, kExitPrecondition);
  EXPECT_EQ(run({"moments", "--env", path("missing.json"), "--n", "3"}).code, kExitPrecondition);
  // every omega above one half, so no positive root
  EXPECT_EQ(run({"assumptions", "--two-point", "0.75", "0.6", "0.5"}).code, kExitPrecondition);
  std::ofstream(path("cfg.json")) << R"({"dist": {"family": "two_point", "p_hi": 0.75, "p_lo": 0.25, "beta": 0.5},
                                       "seed": 1, "n": 100, "replicas": 2})";
  const Outcome r = run({"study", "ergodic-check", "--config", path("cfg.json"), "--out", path("study")});
  EXPECT_EQ(r.code, kExitPrecondition) << r.err;
}

TEST_F(CliTest, ResourceCapExitsFour) {
  save_environment(testing::constant_reflected(0.05, 40), path("steep.json"));
  const Outcome r = run({"cutoff-scan", "--env", path("steep.json"), "--n", "40"});
  EXPECT_EQ(r.code, kExitResourceCap) << r.err;
}

TEST_F(CliTest, CsvFramingAndSidecar) {
  const Outcome r = run({"tv-profile", "--env", path("flat3.json"), "--n", "3", "--schedule", "0,1,2,3",
                     "--out", path("tv.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = slurp(path("tv.csv"));
  EXPECT_EQ(csv.rfind("k,d_k\r\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\r'), 5);
  EXPECT_EQ(csv.find("\r\n0,"), 5u);
  const json side = json::parse(slurp(path("tv.csv.run.json")));
  EXPECT_EQ(side["run_config"]["command"], "tv-profile");

  EXPECT_EQ(run({"potential-dump", "--env", path("flat3.json")}).code, kExitPrecondition);
  save_environment(testing::constant_env(2.0 / 3.0, 3), path("open3.json"));
  const Outcome dump = run({"potential-dump", "--env", path("open3.json")});
  ASSERT_EQ(dump.code, kExitOk) << dump.err;
  EXPECT_EQ(dump.out.rfind("x,V,is_ladder,block_index,block_height\r\n", 0), 0u);
}

TEST_F(CliTest, McHittingMatchesClosedForm) {
  const Outcome r = run({"mc-hitting", "--env", path("flat3.json"), "--n", "3", "--seed", "3", "--replicas", "50000",
                     "--tail-at", "0,5", "--threads", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_LT(std::abs(j["mean"].get<double>() - 5.5), 4.0 * j["se_mean"].get<double>());
  EXPECT_EQ(j["tails"][0]["p"].get<double>(), 1.0);
  const Outcome again = run({"mc-hitting", "--env", path("flat3.json"), "--n", "3", "--seed", "3", "--replicas", "50000",
                         "--tail-at", "0,5", "--threads", "1"});
  EXPECT_EQ(json::parse(again.out)["mean"], j["mean"]);
}

TEST_F(CliTest, StudyWritesVerdicts) {
  std::ofstream(path("cfg.json")) << R"({"dist": {"family": "two_point", "p_hi": 0.75, "p_lo": 0.25, "beta": 0.9},
                                       "seed": 2, "n_grid": [64, 128, 256], "replicas": 4})";
  const Outcome r = run({"study", "scaling-expectation", "--config", path("cfg.json"), "--out", path("s"), "--band-lo",
                     "0.8", "--band-hi", "1.2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json v = json::parse(slurp(path("s/verdicts.json")));
  EXPECT_EQ(v["verdicts"].size(), 1u);
  EXPECT_EQ(v["verdicts"][0]["id"], "expectation_slope");
  EXPECT_TRUE(fs::exists(path("s/raw.csv.run.json")));
  std::ofstream(path("bad.json")) << R"({"dist": {"family": "two_point", "p_hi": 0.75, "p_lo": 0.25, "beta": 0.9}})";
  EXPECT_EQ(run({"study", "scaling-expectation", "--config", path("bad.json"), "--out", path("t")}).code, kExitUsage);
}

}  // namespace
}  // namespace rwre
