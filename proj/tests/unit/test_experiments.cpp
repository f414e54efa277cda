// Copyright 2026 The minkflow Authors
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


#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "minkflow/experiments.hpp"

using namespace minkflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  fs::path p = fs::temp_directory_path() / "minkflow_experiment_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("detector reports") {
  ReportRecord e = triangle_search_report(NormSpec::euclidean(2), 24, true);
  CHECK(e.pass);
  CHECK(e.results["magnitude"].get<double>() < 1e-8);
  CHECK(e.results["verdict"] == "inner_product");
  ReportRecord s = triangle_search_report(NormSpec::shifted_ball(make_vec({0.3, 0.0})), 24, true);
  CHECK(s.pass);
  CHECK(s.results["verdict"] == "non_inner_product");
}

TEST_CASE("step0 and lift reports") {
  ReportRecord r = step0_report(4.0, {25.0, 50.0, 100.0}, 0.0);
  CHECK(r.pass);
  REQUIRE(r.table.size() == 3);
  CHECK(r.table[2][3] < 0.05);
  CHECK_THROWS_AS(step0_report(4.0, {100.0, 50.0}, 0.0), Error);

  ReportRecord l = lift_report(4.0, 1e-3, {16.0, 64.0});
  CHECK(l.pass);
  CHECK(l.table[1][3] < l.table[0][3]);
}

TEST_CASE("gaussian contract with equal widths keeps W2 at |z|") {
  NormSpec e = NormSpec::euclidean(2);
  GaussianContractParams p;
  p.a = p.b = 0.2;
  p.z = make_vec({1.0, 0.0});
  p.grid = Grid::box(2, 6.0, 48);
  p.t_max = 0.2;
  p.frame_dt = 0.1;
  p.analytic = true;
  ReportRecord r = gaussian_contract_demo(e, p);
  CHECK(r.pass);
  for (const auto& row : r.table) CHECK(row[1] == doctest::Approx(1.0).epsilon(0.02));

  p.analytic = false;
  ReportRecord s = gaussian_contract_demo(e, p);
  CHECK(s.pass);
  CHECK(s.results["max_step_drift"].get<double>() < 1e-12);
  CHECK_THROWS_AS(gaussian_contract_demo(NormSpec::shifted_ball(make_vec({0.3, 0.0})), p), Error);
}

TEST_CASE("noncontraction demo on a coarse grid") {
  NoncontractionParams p;
  p.h = 0.006;
  ReportRecord r = noncontraction_demo(NormSpec::regularized_p(4.0, 0.1, 2), p);
  CHECK(r.results["omega_gap_quadrature"].get<double>() > 0.0);
  CHECK(r.results["slope"].get<double>() > 0.0);
  CHECK(r.results["slope"].get<double>() > 3.0 * r.results["noise"].get<double>());
  REQUIRE(r.table.size() == 5);
  CHECK(r.columns == std::vector<std::string>{"t", "w2", "w2_sq", "slope_estimate"});
}

TEST_CASE("run_config writes deterministic artifacts") {
  fs::path dir = scratch_dir("run");
  {
    std::ofstream(dir / "euclid.json") << R"({"family": "euclidean", "dim": 2})";
    std::ofstream(dir / "cfg.json") << R"({"experiment": "triangle-search", "norm": "euclid.json",
      "params": {"angular_grid": 16, "refine": false}, "seed": 7, "out": ")"
                                    << (dir / "out").string() << "\"}";
  }
  ReportRecord r = run_config((dir / "cfg.json").string());
  CHECK(r.pass);
  std::string first = read_all(dir / "out" / "report.json");
  run_config((dir / "cfg.json").string());
  CHECK(read_all(dir / "out" / "report.json") == first);
  CHECK(first.find("\"seed\": 7") != std::string::npos);

  std::ofstream(dir / "missing.json") << R"({"experiment": "step0", "norm": "nope.json"})";
  // step0 does not read the norm; a detector config does.
  std::ofstream(dir / "missing2.json") << R"({"experiment": "triangle-search", "norm": "nope.json"})";
  try {
    run_config((dir / "missing2.json").string());
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
  try {
    run_config(R"({"experiment": "unknown"})");
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }

  ReportRecord s = run_config((dir / "missing.json").string(), (dir / "step0").string());
  CHECK(s.pass);
  CHECK(fs::exists(dir / "step0" / "trace.csv"));
  CHECK(read_all(dir / "step0" / "plot.svg").find("<svg") == 0);
}
