/* Copyright 2026 The qmetro Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>
#include "cli.hpp"
#include "json.hpp"
#include "qmetro/adaptive.hpp"
#include "qmetro/parallel.hpp"
#include "qmetro/qfim.hpp"
#include "qmetro/robustness.hpp"
#include "qmetro/variance.hpp"

namespace qmetro::cli {
namespace {

using nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string error_kind(const Result& r) { return json::parse(r.err)["error"].get<std::string>(); }

TEST(CliFormat, DoubleRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 1.2986027851976063, 5e-324}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x) << format_double(x);
  }
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(CliFormat, GridAndVector) {
  EXPECT_EQ(parse_grid("0.1:0.3:0.1").size(), 3u);
  EXPECT_EQ(parse_grid("1:1:0.5"), std::vector<double>{1.0});
  EXPECT_EQ(parse_vector3("1,-2,3.5"), Vector3(1, -2, 3.5));
  EXPECT_ANY_THROW(parse_grid("1:0:0.1"));
  EXPECT_ANY_THROW(parse_vector3("1,2"));
}

TEST(CliQfim, JsonMatchesLibraryExactly) {
  const Result r = invoke({"qfim", "--model", "btp", "--alpha", "1,0.3,0.5", "--t", "2", "--n", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  const Vector3 alpha(1, 0.3, 0.5);
  const QfimMatrix f = qfim_entangled(btp_model(), alpha, 2.0);
  const Covariance3 c = covariance_from_qfim(f, 10.0);
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["command"], "qfim");
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(doc["rows"][i][j].get<double>(), f.m(i, j));
      EXPECT_EQ(doc["covariance"][i][j].get<double>(), c.m(i, j));
    }
  }
  EXPECT_EQ(doc["scalar_bound"].get<double>(), scalar_bound(Matrix3::Identity(), f, 10.0));
}

TEST(CliQfim, PauliCsv) {
  const Result r = invoke({"qfim", "--model", "pauli", "--alpha", "0,0,0", "--t", "2", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"kind", "i", "j", "value"}));
  int seen = 0;
  for (const auto& row : rows) {
    if (row[0] != "qfim") continue;
    const double v = std::stod(row[3]);
    EXPECT_NEAR(v, row[1] == row[2] ? 16.0 : 0.0, 1e-12);
    ++seen;
  }
  EXPECT_EQ(seen, 9);
}

TEST(CliQfim, Errors) {
  Result r = invoke({"qfim", "--model", "pauli", "--alpha", "0,0,1", "--t", "0"});
  EXPECT_EQ(r.code, kExitDomain);
  EXPECT_EQ(error_kind(r), "SingularQfim");
  r = invoke({"qfim", "--model", "nope", "--alpha", "0,0,1"});
  EXPECT_EQ(r.code, kExitDomain);
  EXPECT_EQ(error_kind(r), "DomainError");
  r = invoke({"qfim", "--model", "btp", "--alpha", "-1,0,0"});
  EXPECT_EQ(r.code, kExitDomain);
  r = invoke({"qfim", "--model", "btp"});
  EXPECT_EQ(r.code, kExitDomain);
  EXPECT_EQ(error_kind(r), "UsageError");
  r = invoke({"frobnicate"});
  EXPECT_EQ(r.code, kExitDomain);
}

TEST(CliVarianceCurve, MatchesLibrary) {
  const Result r = invoke({"variance-curve", "--model", "btp", "--alpha", "1,0.3,0.5", "--t-range",
                           "0.5:20:0.5", "--n", "10", "--param", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"t", "v1", "v2", "v3", "envelope", "infimum", "flag"}));
  const std::vector<double> grid = parse_grid("0.5:20:0.5");
  const auto want = variance_curve(btp_model(), Vector3(1, 0.3, 0.5), grid, 10.0, 1);
  ASSERT_EQ(rows.size(), want.size() + 1);
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto& row = rows[i + 1];
    EXPECT_EQ(std::stod(row[0]), want[i].t);
    EXPECT_EQ(row[6], want[i].pole ? "pole" : "ok");
    if (want[i].pole) continue;
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::stod(row[1 + j]), want[i].v[j], 1e-12 * want[i].v[j]);
    EXPECT_NEAR(std::stod(row[4]), want[i].envelope, 1e-12 * want[i].envelope);
  }
}

TEST(CliSchedule, ThreeIterations) {
  const Result r = invoke({"schedule", "--v0", "1", "--n", "100", "--m", "3", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 4u);
  const AdaptiveSchedule plan = plan_schedule(1.0, 100.0, TargetIterations{3});
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(std::stoi(rows[k + 1][0]), k + 1);
    EXPECT_EQ(std::stod(rows[k + 1][2]), plan.records[k].t);
    EXPECT_EQ(std::stod(rows[k + 1][4]), plan.records[k].v);
    EXPECT_NEAR(std::stod(rows[k + 1][5]), 1.5451679104782425, 1e-9);
  }
}

TEST(CliSchedule, TargetAndErrors) {
  Result r = invoke({"schedule", "--v0", "1", "--n", "100", "--target", "1e-6"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_LE(doc["rows"].back()["v"].get<double>(), 1e-6);
  r = invoke({"schedule", "--v0", "1", "--n", "0", "--m", "3"});
  EXPECT_EQ(r.code, kExitDomain);
  EXPECT_EQ(error_kind(r), "NoContraction");
  r = invoke({"schedule", "--v0", "1", "--n", "100", "--m", "3", "--target", "1e-6"});
  EXPECT_EQ(r.code, kExitDomain);
}

TEST(CliRobustness, SingleMatchesLibrary) {
  const Result r = invoke({"robustness", "single", "--grid", "0.1:3:0.1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"D", "R", "pdf"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = std::stod(rows[i][0]);
    EXPECT_EQ(std::stod(rows[i][1]), ratio_single(d));
    EXPECT_EQ(std::stod(rows[i][2]), deviation_pdf(d));
  }
}

TEST(CliRobustness, TotalIsReproducible) {
  const std::vector<std::string> args{"robustness", "total", "--m", "4", "--samples", "20000", "--seed", "9"};
  auto with_threads = [&](const char* n) {
    std::vector<std::string> a{"--threads", n};
    a.insert(a.end(), args.begin(), args.end());
    return invoke(a);
  };
  const Result one = with_threads("1");
  ASSERT_EQ(one.code, kExitOk) << one.err;
  EXPECT_EQ(with_threads("1").out, one.out);
  EXPECT_EQ(with_threads("4").out, one.out);
  const auto rows = csv(one.out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"R", "cdf"}));
  double below = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][0]) < 1.0) below = std::stod(rows[i][1]);
  }
  EXPECT_GT(below, 0.5);
}

TEST(CliRobustness, SummaryFile) {
  const auto path = std::filesystem::temp_directory_path() / "qmetro_cli_summary.json";
  const Result r = invoke({"robustness", "total", "--m", "3", "--samples", "10000", "--seed", "2",
                           "--summary", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(path);
  const json doc = json::parse(in);
  const RobustnessSummary s = robustness_mc(3, 10000, 2);
  EXPECT_EQ(doc["rows"][0]["m"], 3);
  EXPECT_EQ(doc["rows"][0]["p_below_one"].get<double>(), s.p_below_one);
  EXPECT_EQ(doc["rows"][0]["median"].get<double>(), s.median);
  std::filesystem::remove(path);
}

TEST(CliSimulate, SingleIteration) {
  const Result r = invoke({"simulate", "--beta0", "0.8,-0.4,0.3", "--n", "1000", "--m", "1", "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  ASSERT_EQ(doc["rows"].size(), 1u);
  EXPECT_EQ(doc["rows"][0]["iterations"].size(), 1u);
  EXPECT_EQ(doc["summary"]["completed"], 1);
}

TEST(CliSimulate, Errors) {
  Result r = invoke({"simulate", "--beta0", "1,0,0", "--n", "50", "--backend", "bell", "--seed", "1"});
  EXPECT_EQ(r.code, kExitDomain);
  EXPECT_EQ(error_kind(r), "DomainError");
  r = invoke({"simulate", "--beta0", "1,0,0", "--n", "1000"});
  EXPECT_EQ(r.code, kExitDomain);
  EXPECT_EQ(error_kind(r), "UsageError");
}

TEST(CliThreads, EnvironmentDefault) {
  ::setenv("QMETRO_THREADS", "3", 1);
  EXPECT_EQ(resolve_threads(0), 3u);
  EXPECT_EQ(resolve_threads(2), 2u);
  ::unsetenv("QMETRO_THREADS");
  EXPECT_GE(resolve_threads(0), 1u);
}

}  // namespace
}  // namespace qmetro::cli
