// Copyright 2026 The phaseconv Authors
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("phaseconv_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string &name, const std::string &text) {
        const auto path = (dir_ / name).string();
        std::ofstream(path) << text;
        return path;
    }

    static std::string slurp(const std::string &path) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    Outcome run(const std::string &args) {
        const auto err_path = (dir_ / "stderr.txt").string();
        const std::string cmd = std::string(PHASECONV_CLI) + " " + args + " 2>" + err_path;
        Outcome r;
        FILE *pipe = ::popen(cmd.c_str(), "r");
        char buf[4096];
        for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
        const int status = ::pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = slurp(err_path);
        return r;
    }

    fs::path dir_;
};

const char *kFom = R"({"experiment": "u1-fom", "source": {"probs": [0.5, 0.5]}, "target": {"probs": [0.5, 0.5]},
  "n_grid": [400, 1600, 6400], "m_schedule": "a=0.5", "methods": ["exact", "closed", "mc"], "mc_draws": 400})";

}  // namespace

TEST_F(CliTest, CsvToStdoutIsDeterministic) {
    const auto cfg = write("fom.json", kFom);
    const auto a = run("u1-fom --config " + cfg);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "N,M,f_exact,f_closed,gap,f_mc,mc_stderr");
    EXPECT_NE(a.out.find("\n400,20,0.987725508848,"), std::string::npos);
    EXPECT_EQ(run("u1-fom --config " + cfg).out, a.out);
    EXPECT_EQ(run("u1-fom --config " + cfg + " --jobs 1").out, a.out);
    EXPECT_EQ(run("u1-fom --config " + cfg + " --jobs 3").out, a.out);

    const auto out = (dir_ / "out.csv").string();
    ASSERT_EQ(run("u1-fom --config " + cfg + " --out " + out).code, 0);
    EXPECT_EQ(slurp(out), a.out);
}

TEST_F(CliTest, SeedOverride) {
    const auto cfg = write("fom.json", kFom);
    const auto a = run("u1-fom --config " + cfg + " --seed 1");
    const auto b = run("u1-fom --config " + cfg + " --seed 2");
    ASSERT_EQ(a.code, 0);
    EXPECT_NE(a.out, b.out);
    EXPECT_EQ(a.out, run("u1-fom --config " + cfg + " --seed 1").out);
    const auto meta = nlohmann::json::parse(run("u1-fom --config " + cfg + " --seed 9 --format json").out)["metadata"];
    EXPECT_EQ(meta["seed"], 9);
}

TEST_F(CliTest, JsonOutput) {
    const auto cfg = write("fom.json", kFom);
    const auto r = run("u1-fom --config " + cfg + " --format json");
    ASSERT_EQ(r.code, 0);
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["metadata"]["schema_version"], 1);
    EXPECT_EQ(doc["rows"].size(), 3u);
    EXPECT_EQ(doc["rows"][2]["M"], 80);
    EXPECT_FALSE(doc["metadata"].contains("wall_time_s"));
    EXPECT_EQ(r.out, run("u1-fom --config " + cfg + " --format json").out);
    const auto timed = nlohmann::json::parse(run("u1-fom --config " + cfg + " --format json --timing").out);
    EXPECT_TRUE(timed["metadata"].contains("wall_time_s"));
}

TEST_F(CliTest, ConfigOutputAndFormatKeys) {
    const auto out = (dir_ / "from_config.json").string();
    auto doc = nlohmann::json::parse(kFom);
    doc["output"] = out;
    doc["format"] = "json";
    const auto cfg = write("fom.json", doc.dump());
    const auto r = run("u1-fom --config " + cfg);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(nlohmann::json::parse(slurp(out))["rows"].size(), 3u);
}

TEST_F(CliTest, ValidationErrorsExitOne) {
    const auto cfg = write("bad.json", R"({"experiment": "u1-fom", "source": {"probs": [0.5, 0.4]},
        "target": {"probs": [0.5, 0.5]}, "n_grid": [10], "m_schedule": "a=0.5", "extra": 1})");
    const auto r = run("u1-fom --config " + cfg);
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("source.probs"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("extra: unknown key"), std::string::npos) << r.err;

    EXPECT_EQ(run("u1-fom --config " + (dir_ / "missing.json").string()).code, 1);
    EXPECT_EQ(run("no-such-experiment --config " + write("ok.json", kFom)).code, 1);
    EXPECT_EQ(run("zd --config " + write("ok2.json", kFom)).code, 1);
    EXPECT_EQ(run("u1-fom").code, 1);
    EXPECT_EQ(run("u1-fom --config " + write("ok3.json", kFom) + " --format xml").code, 1);
}

TEST_F(CliTest, PartialAndResourceFailures) {
    auto doc = nlohmann::json::parse(kFom);
    doc["source"] = {{"probs", {1.0}}};
    doc["methods"] = {"exact", "closed"};
    auto r = run("u1-fom --config " + write("flat.json", doc.dump()));
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "N,M,f_exact,f_closed,gap,error");

    doc = nlohmann::json::parse(kFom);
    doc["caps"] = {{"fft_max_support", 400}};
    r = run("u1-fom --config " + write("capped.json", doc.dump()));
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("rows failed"), std::string::npos);
}

TEST_F(CliTest, EveryExperimentRuns) {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"u1-rates", R"({"source": {"probs": [0.5, 0.5]}, "target": {"probs": [0.5, 0.5]}, "n_grid": [100, 400], "m_schedule": "c=1"})"},
        {"u1-posterior", R"({"source": {"probs": [0.5, 0.5]}, "n_grid": [64, 256]})"},
        {"zd", R"({"source": {"probs": [0.9, 0.1]}, "n_grid": [2, 3, 4]})"},
        {"mixed-bound", R"({"source": {"probs": [0.5, 0.5]}, "target": {"components": [{"weight": 0.5, "probs": [0.5, 0.5]},
            {"weight": 0.5, "probs": [0.3, 0.7], "offset": 1}]}, "n_grid": [100], "m_schedule": [9]})"},
        {"mixed-oracle", R"({"target": {"components": [{"weight": 0.5, "probs": [0.5, 0.5]},
            {"weight": 0.5, "probs": [0.3, 0.7]}]}, "m_schedule": [2], "gammas": [0.3]})"},
    };
    const std::map<std::string, std::string> headers = {
        {"u1-rates", "N,M,f_exact,f_closed,gap"},
        {"u1-posterior", "N,tv_distance,l1_spectrum,peak_exact,peak_gauss"},
        {"zd", "d,N,success_prob,failure_prob,epsilon,max_flat_dev"},
        {"mixed-bound", "N,M,epsilon,delta_rho,classes,f_bound,f_closed_mean"},
        {"mixed-oracle", "M,gamma,f_dense,bound_exact_class,bound_gauss,delta_rho"},
    };
    for (const auto &[name, text] : cases) {
        const auto r = run(name + " --config " + write(name + ".json", text));
        EXPECT_EQ(r.code, 0) << name << ": " << r.err;
        EXPECT_EQ(r.out.substr(0, r.out.find('\n')), headers.at(name));
    }
}
