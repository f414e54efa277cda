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
#include "minkflow/io.hpp"

using namespace minkflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  fs::path p = fs::temp_directory_path() / "minkflow_io_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("norm specs round trip through JSON") {
  Mat S(2, 2);
  S << 1.0, 0.4, 0.0, 1.0;
  Mat A(2, 2);
  A << 2.0, 0.3, 0.3, 1.0;
  std::vector<NormSpec> norms{NormSpec::quadratic(A), NormSpec::regularized_p(8.0, 1e-3, S),
                              NormSpec::shifted_ball(make_vec({0.3, -0.1})),
                              NormSpec::reversed(NormSpec::shifted_ball(make_vec({0.5, 0.0})))};
  for (const auto& n : norms) {
    NormSpec back = norm_from_json(Json::parse(norm_to_json(n).dump()));
    CHECK(back.family() == n.family());
    for (int k = 0; k < 50; ++k) {
      Vec x = sample_direction(2, k, 50) * (0.5 + k * 0.1);
      CHECK(back.value(x) == doctest::Approx(n.value(x)).epsilon(1e-14));
    }
  }
  NormSpec e = load_norm(R"({"family": "euclidean", "dim": 3})");
  CHECK(e.value(make_vec({1.0, 2.0, 2.0})) == doctest::Approx(3.0));
  NormSpec l4 = load_norm(R"({"family": "regularized_p", "dim": 2, "params": {"p": 4, "eps": 0}})");
  CHECK(l4.value(make_vec({1.0, 1.0})) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("invalid configs raise InvalidConfig") {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ZeroVector;
  };
  CHECK(kind_of([] { load_norm("/nonexistent/norm.json"); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { load_norm("{\"family\": 3}"); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { load_norm("{\"family\": \"l1\", \"dim\": 2}"); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { load_norm("{\"family\": \"quadratic\"}"); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { load_norm("{\"family\": \"regularized_p\", \"dim\": 2, \"params\": {\"p\": 1.5}}"); }) ==
        ErrorKind::InvalidConfig);
  CHECK(kind_of([] { load_norm("{broken"); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { grid_from_json(Json::parse(R"({"lo": [0], "hi": [1]})")); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { load_potential(R"({"kind": "cubic"})", 2); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("potentials parse") {
  PotentialSpec q = load_potential(R"({"kind": "quadratic", "Q": [[1, 0], [0, 2]], "center": [1, 0], "scale": 2})", 2);
  CHECK(q.kind == PotentialKind::Quadratic);
  CHECK(q.Q(1, 1) == 2.0);
  CHECK(q.scale == 2.0);
  PotentialSpec d = load_potential(R"({"kind": "squared_distance", "z": [0.5, 0.5]})", 2);
  CHECK(d.z(0) == 0.5);
  CHECK(load_potential(R"({"kind": "squared_reverse_norm"})", 2).kind == PotentialKind::SquaredReverseNorm);
}

TEST_CASE("density files round trip") {
  fs::path dir = scratch_dir("density");
  Grid g = Grid::make({-1.0, -2.0}, {1.0, 2.0}, {8, 12});
  GridDensity rho = make_density(g, [](const Vec& x) { return std::exp(-x.squaredNorm()) * (1.0 + 0.3 * x(0)); });
  write_density(rho, (dir / "rho.json").string());
  CHECK(fs::exists(dir / "rho.csv"));
  CHECK(read_all(dir / "rho.csv").rfind("rho\n", 0) == 0);
  GridDensity back = read_density((dir / "rho.json").string());
  CHECK(back.grid.same_as(g));
  for (size_t i = 0; i < rho.values.size(); ++i) CHECK(back.values[i] == doctest::Approx(rho.values[i]).epsilon(1e-15));
}

TEST_CASE("csv and svg writers") {
  fs::path dir = scratch_dir("csv");
  Trajectory tr;
  tr.times = {0.0, 0.5};
  tr.states = {make_vec({1.0, 2.0}), make_vec({0.5, 1.0})};
  write_trajectory_csv(tr, (dir / "traj.csv").string());
  std::string text = read_all(dir / "traj.csv");
  CHECK(text.rfind("t,x0,x1\n", 0) == 0);
  CHECK(text.find("0.5,0.5,1\n") != std::string::npos);

  DensityTrajectory dt;
  dt.diagnostics.push_back(FrameDiagnostics{});
  write_series_csv(dt, (dir / "series.csv").string());
  CHECK(read_all(dir / "series.csv").rfind("t,mass,entropy,m2_fwd,m2_bwd,dissipation\n", 0) == 0);

  std::string svg = svg_line_chart({0.0, 1.0, 2.0}, {{"w2", {1.0, 0.9, 0.85}}}, "t", "W2");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find(">t</text>") != std::string::npos);
  CHECK(svg.find(">W2</text>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
}
