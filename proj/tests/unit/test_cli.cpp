// Copyright 2026 The ED-Filter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "edfilter/classifier.hpp"
#include "edfilter/cli.hpp"
#include "oracles.hpp"

namespace edfilter::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;

  nlohmann::json report() const { return nlohmann::json::parse(out); }
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("edfilter_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string synth(const std::string& name, int features, int rows, std::uint64_t seed) {
    const auto csv = path(name);
    const auto r = invoke({"synth", "--csv", csv, "--n-features", std::to_string(features),
                           "--n-rows", std::to_string(rows), "--seed", std::to_string(seed)});
    EXPECT_EQ(r.code, 0) << r.err;
    return csv;
  }

  fs::path dir_;
};

TEST_F(CliTest, ExactWithoutPruningMatchesOracle) {
  const auto csv = synth("d.csv", 8, 400, 7);
  const auto exact = invoke({"select", "--algorithm", "exact", "--data", csv, "--no-prune"});
  const auto oracle = invoke({"oracle", "--data", csv});
  ASSERT_EQ(exact.code, 0) << exact.err;
  ASSERT_EQ(oracle.code, 0) << oracle.err;
  EXPECT_EQ(exact.report()["result"]["theta"], oracle.report()["result"]["theta"]);
  EXPECT_EQ(exact.report()["result"]["indices"], oracle.report()["result"]["indices"]);
}

TEST_F(CliTest, RankTable1) {
  const auto csv = path("table1.csv");
  save_csv(testing::table1(), csv);
  const auto r = invoke({"rank", "--data", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = r.report()["result"];
  ASSERT_EQ(rows.size(), 15u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(rows[i - 1]["score"].get<double>(), rows[i]["score"].get<double>());
  }
  EXPECT_TRUE(rows[0].contains("feature"));
}

TEST_F(CliTest, RankTopKScoresBestRankedFeatures) {
  const auto csv = synth("d.csv", 6, 300, 3);
  const auto r = invoke({"rank", "--data", csv, "--top-k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = r.report();
  const auto top = report["diagnostics"]["top_k"];
  ASSERT_EQ(top["features"].size(), 2u);
  const std::set<std::string> best{report["result"][0]["feature"].get<std::string>(),
                                   report["result"][1]["feature"].get<std::string>()};
  EXPECT_EQ(best, (std::set<std::string>{top["features"][0].get<std::string>(),
                                        top["features"][1].get<std::string>()}));
  const auto m = load_csv(csv);
  const auto indices = top["indices"].get<std::vector<std::size_t>>();
  EXPECT_EQ(top["theta"].get<double>(), accuracy(m, FeatureSubset(indices), CvConfig{}));

  EXPECT_EQ(invoke({"rank", "--data", csv, "--top-k", "7"}).code, kExitUsage);
  EXPECT_FALSE(invoke({"rank", "--data", csv}).report().contains("diagnostics"));
}

TEST_F(CliTest, HybridWithoutModelIsUsageError) {
  const auto csv = synth("d.csv", 5, 200, 1);
  const auto r = invoke({"select", "--algorithm", "hybrid", "--data", csv});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("--model"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(invoke({"select", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"select", "--data", path("missing.csv")}).code, kExitDataError);
  std::ofstream(path("bad.csv")) << "a,y\n-1,0\n1,1\n";
  const auto bad = invoke({"rank", "--data", path("bad.csv")});
  EXPECT_EQ(bad.code, kExitDataError);
  EXPECT_NE(bad.err.find("negative"), std::string::npos);
  EXPECT_TRUE(bad.out.empty());
  const auto csv = synth("d.csv", 5, 200, 1);
  EXPECT_EQ(invoke({"select", "--data", csv, "--cv-folds", "1"}).code, kExitUsage);
  EXPECT_EQ(invoke({"select", "--data", csv, "--algorithm", "beam"}).code, kExitUsage);
  EXPECT_EQ(invoke({"select", "--data", csv, "--model", path("nope.json"), "--algorithm", "hybrid"}).code,
            kExitDataError);
  const auto wide = synth("wide.csv", 13, 100, 1);
  EXPECT_EQ(invoke({"oracle", "--data", wide}).code, kExitDataError);
}

TEST_F(CliTest, OneJsonDocumentAndQuietStderr) {
  const auto csv = synth("d.csv", 5, 200, 1);
  const auto r = invoke({"select", "--algorithm", "greedy", "--data", csv});
  ASSERT_EQ(r.code, 0);
  EXPECT_NO_THROW(nlohmann::json::parse(r.out));
  EXPECT_TRUE(r.err.empty());
  const auto verbose = invoke({"select", "--algorithm", "greedy", "--data", csv, "--verbose"});
  EXPECT_FALSE(verbose.err.empty());
  EXPECT_EQ(strip_timings(verbose.report()["result"]), strip_timings(r.report()["result"]));
}

TEST_F(CliTest, ReportContents) {
  const auto csv = synth("d.csv", 5, 200, 1);
  const auto r = invoke({"select", "--algorithm", "exact", "--data", csv, "--seed", "5"});
  const auto j = r.report();
  EXPECT_EQ(j["tool"], "edfilter");
  EXPECT_EQ(j["version"], std::string(tool_version()));
  EXPECT_EQ(j["command"], "select");
  EXPECT_EQ(j["config"]["cv"]["seed"], 5);
  EXPECT_TRUE(j["config"].contains("data_digest"));
  EXPECT_TRUE(j.contains("runtime_ms"));
  EXPECT_TRUE(j["result"].contains("runtime_ms"));
}

TEST_F(CliTest, OutFlagWritesFile) {
  const auto csv = synth("d.csv", 5, 200, 1);
  const auto r = invoke({"rank", "--data", csv, "--out", path("rank.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path("rank.json"));
  EXPECT_NO_THROW(nlohmann::json::parse(in));
}

TEST_F(CliTest, ReplayReproducesReports) {
  const auto csv = synth("d.csv", 6, 300, 3);
  const std::vector<std::vector<std::string>> commands{
      {"synth", "--csv", path("s.csv"), "--n-features", "4", "--seed", "9"},
      {"rank", "--data", csv},
      {"select", "--algorithm", "greedy", "--data", csv, "--prune-log"},
      {"select", "--algorithm", "exact", "--data", csv, "--alpha", "0.5", "--cv-folds", "4"},
      {"oracle", "--data", csv}};
  for (const auto& args : commands) {
    const auto first = invoke(args);
    ASSERT_EQ(first.code, 0) << first.err;
    std::ofstream(path("report.json")) << first.out;
    const auto again = invoke({"replay", "--report", path("report.json")});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(strip_timings(first.report()).dump(), strip_timings(again.report()).dump())
        << args.front();
  }
}

TEST_F(CliTest, ReplayDetectsChangedInput) {
  const auto csv = synth("d.csv", 5, 200, 1);
  const auto first = invoke({"rank", "--data", csv});
  std::ofstream(path("report.json")) << first.out;
  synth("d.csv", 5, 200, 2);
  EXPECT_EQ(invoke({"replay", "--report", path("report.json")}).code, kExitDataError);
}

TEST_F(CliTest, SynthConfigFile) {
  std::ofstream(path("spec.json")) << R"({"n_features": 4, "n_informative": 2, "n_rows": 80,
      "n_classes": 3, "noise_rate": 0.0, "max_count": 4, "seed": 11})";
  const auto r = invoke({"synth", "--config", path("spec.json"), "--csv", path("s.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = load_csv(path("s.csv"));
  EXPECT_EQ(m.n_features(), 4u);
  EXPECT_EQ(m.n_classes(), 3);
  EXPECT_EQ(m, synth_generate(SynthSpec{4, 2, 80, 3, 0.0, 4, 11}));
  std::ofstream(path("bad.json")) << R"({"n_features": 4, "colour": 1})";
  EXPECT_EQ(invoke({"synth", "--config", path("bad.json"), "--csv", path("s.csv")}).code,
            kExitDataError);
}

TEST_F(CliTest, TrainThenHybridAndBenchmark) {
  const auto a = synth("a.csv", 6, 600, 1);
  const auto b = synth("b.csv", 8, 600, 2);
  const auto model = path("model.json");
  const auto t = invoke({"train", "--data", a, "--data", b, "--model-out", model, "--epochs", "20",
                         "--chunk-size", "100"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(t.report()["result"]["examples"], 12);

  const auto h = invoke({"select", "--algorithm", "hybrid", "--model", model, "--data", b});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_TRUE(h.report()["diagnostics"].contains("cardinality_cap"));

  const auto bench = invoke({"benchmark", "--model", model, "--sample-sizes", "200,300",
                             "--feature-counts", "6", "--csv", path("bench.csv")});
  ASSERT_EQ(bench.code, 0) << bench.err;
  const auto res = bench.report()["result"];
  EXPECT_EQ(res["rows"].size(), 4u);
  EXPECT_FALSE(res["gap_max"].is_null());
  EXPECT_GE(res["gap_max"].get<double>(), res["gap_min"].get<double>());
  std::ifstream csv(path("bench.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, kBenchmarkCsvHeader);

  std::ofstream(path("report.json")) << bench.out;
  const auto again = invoke({"replay", "--report", path("report.json")});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(strip_timings(bench.report()).dump(), strip_timings(again.report()).dump());

  EXPECT_EQ(invoke({"benchmark", "--sample-sizes", "200", "--feature-counts", "6"}).code,
            kExitUsage);
  EXPECT_EQ(invoke({"benchmark", "--sample-sizes", "200,x"}).code, kExitUsage);
}

TEST(StripTimings, RemovesNestedRuntimeFields) {
  const nlohmann::json j = {{"runtime_ms", 1.0},
                            {"rows", {{{"runtime_ms", 2.0}, {"theta", 0.5}}}},
                            {"keep", 3}};
  EXPECT_EQ(strip_timings(j), (nlohmann::json{{"rows", {{{"theta", 0.5}}}}, {"keep", 3}}));
}

}  // namespace
}  // namespace edfilter::cli
