#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scatter/cli.hpp"

using scatter::cli::Json;

namespace {

const std::string kData = SCATTER_DATA_DIR;

struct Result {
  int code;
  std::string out;
  Json doc;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = scatter::cli::run(args, out, err);
  Json doc;
  try {
    doc = Json::parse(out.str());
  } catch (const Json::parse_error&) {
  }
  return {code, out.str(), doc};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("scatter_cli_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(Cli, SolveExampleOne) {
  const auto r = run({"solve", kData + "/example1.json", "--seed", "7"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.doc["command"], "solve");
  EXPECT_EQ(r.doc["interior"].size(), 3u);
  EXPECT_EQ(r.doc["path_stats"]["total"], 3);
  EXPECT_TRUE(r.doc["counts_check"]["interior_matches"].get<bool>());
  EXPECT_FALSE(r.doc.contains("boundary_clusters"));
}

TEST(Cli, SolveIsDeterministic) {
  const auto a = run({"solve", kData + "/example25.json", "--seed", "3", "--return-boundary"});
  const auto b = run({"solve", kData + "/example25.json", "--seed", "3", "--return-boundary"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  ASSERT_EQ(a.doc["boundary_clusters"].size(), 1u);
  EXPECT_EQ(a.doc["boundary_clusters"][0]["support"], Json::array({0, 1}));
  const auto c = run({"solve", kData + "/example25.json", "--seed", "4", "--return-boundary"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, AnalyzeExampleTwo) {
  const auto r = run({"analyze", kData + "/example25.json"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.doc["reciprocal_degree"], 2);
  EXPECT_EQ(r.doc["ml_degree"], 1);
  EXPECT_EQ(r.doc["criterion"]["verdict"], "strict");
  EXPECT_EQ(r.doc["criterion"]["witnesses"], Json::array({Json::array({0, 1})}));
  EXPECT_EQ(r.doc["flat_counts"]["type_ii"].get<int>() + r.doc["flat_counts"]["type_i"].get<int>() +
                r.doc["flat_counts"]["neither"].get<int>(),
            10);
  EXPECT_EQ(r.doc["circuits"][0]["alpha"], Json::array({"1", "1", "-1"}));
}

TEST(Cli, ChySix) {
  const auto r = run({"chy", "--m", "6", "--seed", "7"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.doc["census_matches"].get<bool>());
  EXPECT_EQ(r.doc["path_mass"], 18);
  EXPECT_EQ(r.doc["census"][0]["observed_count"], 6);
  EXPECT_TRUE(r.doc["sub_scattering_ok"].get<bool>());
  EXPECT_EQ(r.doc["extra_type_ii_flats"].size(), 3u);
}

TEST(Cli, ChyTable) {
  const auto r = run({"chy", "--m", "5", "--format", "table"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("census matches"), std::string::npos);
}

TEST(Cli, HilbertTable) {
  const auto r = run({"hilbert", kData + "/example1.json", "--q", "3"});
  EXPECT_EQ(r.code, 0);
  const auto& rows = r.doc["hilbert_function"];
  ASSERT_EQ(rows.size(), 4u);
  const std::vector<int> hf{1, 4, 10, 19};
  for (int q = 0; q <= 3; ++q) EXPECT_EQ(rows[static_cast<std::size_t>(q)]["HF_RL"], hf[static_cast<std::size_t>(q)]);
  EXPECT_EQ(rows[3]["HF_quotient"], 3);
  EXPECT_EQ(r.doc["regularity"], 0);
}

TEST(Cli, EliminantWithExactU) {
  const auto u = temp_path("u.json");
  write_file(u, R"(["1", "2/3", "-5/7", "3"])");
  const auto r = run({"eliminant", kData + "/example1.json", "--u-file", u, "--h1", "0,1,0,0", "--h2", "0,0,1,0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.doc["degree"], 3);
  EXPECT_EQ(r.doc["coefficients"].size(), 4u);
  EXPECT_EQ(r.doc["coefficients"][3], "1");
  EXPECT_EQ(r.doc["u"], Json::array({"1", "2/3", "-5/7", "3"}));
  std::remove(u.c_str());
}

TEST(Cli, CertifyStoredReport) {
  const auto report = temp_path("report.json");
  const auto solved = run({"solve", kData + "/example1.json", "--out", report});
  EXPECT_EQ(solved.code, 0);
  EXPECT_TRUE(solved.out.empty());
  const auto r = run({"certify", "--report", report});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.doc["certified"].get<bool>());
  EXPECT_TRUE(r.doc["reality_checked"].get<bool>());
  EXPECT_EQ(r.doc["bounded_chambers"], 3);

  Json tampered = Json::parse(std::ifstream(report));
  tampered["interior"].erase(tampered["interior"].begin());
  std::ofstream(report) << tampered.dump();
  const auto bad = run({"certify", "--report", report});
  EXPECT_EQ(bad.code, 3);
  EXPECT_EQ(bad.doc["error"], "CountMismatch");
  std::remove(report.c_str());
}

TEST(Cli, OverridesAreApplied) {
  const auto a0 = temp_path("a0.json");
  write_file(a0, R"([[[1, 0.5], [2, 0], [0, -1], [0.3, 0.3]], [[0, 1], [1, 1], [-1, 0], [2, -0.5]]])");
  const auto r = run({"solve", kData + "/example1.json", "--a0-file", a0, "--omega", "4,3,2,1", "--tol-corrector", "1e-11",
                      "--tol-zero", "1e-7", "--tol-cluster", "1e-5", "--max-steps", "5000"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.doc["omega"], Json::array({4, 3, 2, 1}));
  EXPECT_EQ(r.doc["interior"].size(), 3u);
  std::remove(a0.c_str());
}

TEST(Cli, BenchReportsTimings) {
  const auto r = run({"solve", kData + "/example1.json", "--bench"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.doc["timings"].contains("tracking"));
  const auto rnd = run({"solve", "--bench", "--d", "2", "--n", "4", "--trials", "2"});
  EXPECT_EQ(rnd.code, 0);
  ASSERT_EQ(rnd.doc["runs"].size(), 2u);
  EXPECT_EQ(rnd.doc["runs"][0]["paths"], 6);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"solve", "/nonexistent/instance.json"}).code, 1);
  EXPECT_EQ(run({"chy", "--m", "12"}).code, 1);
  EXPECT_EQ(run({"chy", "--m", "12"}).doc["error"], "BadM");
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"solve", kData + "/example1.json", "--omega", "1,1,2,3"}).code, 1);

  const auto deficient = temp_path("deficient.json");
  write_file(deficient, R"({"d": 2, "n": 2, "L": [["1","0","0"],["0","1","1"],["0","2","2"]]})");
  const auto r = run({"analyze", deficient});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.doc["error"], "RankDeficient");
  std::remove(deficient.c_str());

  const auto failing = run({"solve", kData + "/example1.json", "--max-steps", "3"});
  EXPECT_EQ(failing.code, 2);
}
