// Copyright 2026 The bellcheck Authors
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

// Drives the bellcheck executable end to end.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run(const std::string &args) {
    const std::string cmd = std::string(BELLCHECK_CLI) + " " + args + " 2>/dev/null";
    CliResult r;
    std::FILE *pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

Json run_json(const std::string &args, int expected_code = 0) {
    const CliResult r = run(args + " --json -");
    EXPECT_EQ(r.code, expected_code) << args;
    try {
        return Json::parse(r.out);
    } catch (const std::exception &e) {
        ADD_FAILURE() << "stdout is not JSON for `" << args << "`: " << e.what();
        return {};
    }
}

std::string data(const std::string &name) { return std::string(BELLCHECK_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bellcheck-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) +
                "-" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, BoundsOfMermin) {
    const Json j = run_json("bounds");
    EXPECT_EQ(j["lhv_bound"], 2.0);
    EXPECT_EQ(j["algebraic_bound"], 4.0);
    EXPECT_EQ(j["witness"]["index"], 1);
    const CliResult text = run("bounds --expr " + data("mermin3.json"));
    EXPECT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("lhv bound       2"), std::string::npos);
}

TEST_F(Cli, BoundsOfEmbeddedChshAndZeroExpression) {
    EXPECT_EQ(run_json("bounds --expr " + data("chsh-embedded.json"))["lhv_bound"], 2.0);
    EXPECT_EQ(run("bounds --expr " + data("zero.json")).code, 3);
    EXPECT_EQ(run("bounds --expr " + path("missing.json")).code, 3);
    EXPECT_EQ(run("bounds --cap 32").code, 3);
}

TEST_F(Cli, QuantumValues) {
    EXPECT_EQ(run_json("quantum --v 0.71")["bell_value"], 2.84);
    EXPECT_EQ(run_json("quantum --v 1")["bell_value"], 4.0);
    EXPECT_EQ(run_json("quantum --v 0")["bell_value"], 0.0);
    EXPECT_EQ(run("quantum --v 1.5").code, 3);
    EXPECT_EQ(run("quantum").code, 2);
}

TEST_F(Cli, SimulateIsDeterministic) {
    ASSERT_EQ(run("simulate --quantum-v 0.71 --shots 5000 --seed 3 --out " + path("a.json")).code, 0);
    ASSERT_EQ(run("simulate --quantum-v 0.71 --shots 5000 --seed 3 --out " + path("b.json")).code, 0);
    ASSERT_EQ(run("simulate --quantum-v 0.71 --shots 5000 --seed 4 --out " + path("c.json")).code, 0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
    EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(Cli, SimulateUniformLhv) {
    const Json j = run_json("simulate --lhv uniform --shots 20000 --seed 5 --out " + path("lhv.json"));
    const double value = j["bell_estimate"]["value"];
    const double err = j["bell_estimate"]["stderr"];
    EXPECT_GT(err, 0.0);
    EXPECT_LE(std::abs(value), 5 * err);
    EXPECT_EQ(run("simulate --shots 10 --out " + path("x.json")).code, 2);
    EXPECT_EQ(run("simulate --quantum-v 0.5 --lhv uniform --out " + path("x.json")).code, 2);
}

TEST_F(Cli, CompareSimulatedQuantumData) {
    ASSERT_EQ(run("simulate --quantum-v 0.71 --shots 100000 --seed 9 --out " + path("q.json")).code, 0);
    const CliResult r = run("compare " + path("q.json"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verdict: quantum_closer"), std::string::npos);
    ASSERT_TRUE(fs::exists(path("q.compare.json")));
    const Json report = Json::parse(slurp(path("q.compare.json")));
    EXPECT_EQ(report["verdict"], "quantum_closer");
    EXPECT_LE(report["lhv_fit"]["bell_value"].get<double>(), 2.0 + 1e-9);
    EXPECT_NEAR(report["quantum_fit"]["visibility"].get<double>(), 0.71, 0.01);
}

TEST_F(Cli, CompareDeterministicStrategyData) {
    ASSERT_EQ(run("simulate --lhv " + data("all-plus-model.json") + " --shots 1000 --out " +
                  path("plus.json"))
                  .code,
              0);
    const Json report = run_json("compare " + path("plus.json"));
    EXPECT_EQ(report["verdict"], "lhv_closer");
    EXPECT_EQ(report["quantum_fit"]["visibility"], 0.0);
}

TEST_F(Cli, CompareCorrelationCsv) {
    {
        std::ofstream csv(path("t.csv"));
        csv << "i,j,k,E,stderr\n"
               "0,0,0,0.71,0\n0,0,1,0,0\n0,1,0,0,0\n0,1,1,-0.71,0\n"
               "1,0,0,0,0\n1,0,1,-0.71,0\n1,1,0,-0.71,0\n1,1,1,0,0\n";
    }
    const Json report = run_json("compare --table " + path("t.csv"));
    EXPECT_EQ(report["verdict"], "quantum_closer");
    EXPECT_EQ(report["quantum_fit"]["residual"], 0.0);
    EXPECT_NEAR(report["lhv_fit"]["residual"].get<double>(), 0.1764, 1e-6);
}

TEST_F(Cli, CompareRejectsMalformedDataset) {
    ASSERT_EQ(run("simulate --quantum-v 0.71 --shots 100 --out " + path("d.json")).code, 0);
    Json j = Json::parse(slurp(path("d.json")));
    j["tuples"][3]["counts"]["+++"] = j["tuples"][3]["counts"]["+++"].get<int>() + 1;
    std::ofstream(path("bad.json")) << j.dump();
    EXPECT_EQ(run("compare " + path("bad.json")).code, 3);
    std::ofstream(path("garbage.json")) << "{not json";
    EXPECT_EQ(run("compare " + path("garbage.json")).code, 3);
    EXPECT_EQ(run("compare").code, 2);
}

TEST_F(Cli, ReproducePasses) {
    const Json j = run_json("reproduce");
    EXPECT_EQ(j["passed"], true);
    EXPECT_EQ(j["values"]["lhv_bound"], 2.0);
    EXPECT_EQ(j["values"]["algebraic_bound"], 4.0);
    EXPECT_EQ(j["values"]["quantum_value_pure_ghz"], 4.0);
    EXPECT_EQ(j["values"]["quantum_value_v071"], 2.84);
    EXPECT_EQ(j["values"]["white_noise_max_abs_correlation"], 0.0);
    EXPECT_EQ(run_json("reproduce --seed 12345")["passed"], true);
}

TEST_F(Cli, ReproduceWithFewShots) {
    // With 100 shots the fixed values still hold and the statistical checks
    // use the correspondingly wide error bars.
    const CliResult r = run("reproduce --shots 100 --seed 1 --json -");
    ASSERT_TRUE(r.code == 0 || r.code == 4) << r.code;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["values"]["quantum_value_v071"], 2.84);
    EXPECT_EQ(j["passed"], r.code == 0);
    EXPECT_EQ(run("reproduce --shots 0").code, 3);
}

TEST_F(Cli, ConfigFileAndOverride) {
    const std::string cfg = data("simulate-config.json");
    ASSERT_EQ(run("simulate --config " + cfg + " --out " + path("cfg.json")).code, 0);
    ASSERT_EQ(run("simulate --quantum-v 0.71 --shots 100000 --seed 7 --out " + path("flags.json")).code, 0);
    EXPECT_EQ(slurp(path("cfg.json")), slurp(path("flags.json")));

    ASSERT_EQ(run("simulate --config " + cfg + " --seed 8 --out " + path("cfg8.json")).code, 0);
    ASSERT_EQ(run("simulate --quantum-v 0.71 --shots 100000 --seed 8 --out " + path("flags8.json")).code, 0);
    EXPECT_EQ(slurp(path("cfg8.json")), slurp(path("flags8.json")));
    EXPECT_NE(slurp(path("cfg8.json")), slurp(path("cfg.json")));

    EXPECT_EQ(run("simulate --config " + path("nope.json") + " --out " + path("x.json")).code, 3);
}

TEST_F(Cli, DistinctExitCodes) {
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("quantum --v 2").code, 3);
    EXPECT_EQ(run("reproduce --sigmas 0").code, 4);
}
