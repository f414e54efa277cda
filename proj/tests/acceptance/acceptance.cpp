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


// Acceptance runner: one PASS/FAIL line per criterion. Tolerances and runtime budgets are fixed
// here. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "minkflow/entropy.hpp"
#include "minkflow/experiments.hpp"
#include "minkflow/flows.hpp"
#include "minkflow/heat.hpp"
#include "minkflow/random.hpp"
#include "minkflow/transport.hpp"
#include "minkflow/triangle.hpp"

using namespace minkflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

NormSpec sheared_l8() { return NormSpec::regularized_p(8.0, 1e-3, mat2(1.0, 0.9, 0.0, 1.0)); }
NormSpec l4_heat() { return NormSpec::regularized_p(4.0, 0.1, 2); }

struct Named {
  std::string name;
  NormSpec spec;
};

std::vector<Named> families() {
  return {{"euclidean", NormSpec::euclidean(2)},
          {"quadratic", NormSpec::quadratic(mat2(2.0, 0.5, 0.5, 1.0))},
          {"l4", NormSpec::regularized_p(4.0, 1e-3, 2)},
          {"sheared_l8", sheared_l8()},
          {"shifted_ball", NormSpec::shifted_ball(make_vec({0.5, 0.0}))},
          {"reversed", NormSpec::reversed(NormSpec::shifted_ball(make_vec({0.3, -0.2})))}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

Outcome step0() {
  Step0Table tab = step0_limit(4.0, {25.0, 50.0, 100.0}, 0.0);
  double last = tab.rows.back().rel_error;
  return {tab.monotone && last < 0.05,
          "rel_error(R=100) " + fmt(last) + (tab.monotone ? ", monotone" : ", not monotone")};
}

Outcome scaling() {
  NormSpec l4 = NormSpec::regularized_p(4.0, 1e-3, 2);
  TentDensity t = make_tent(l4, step0_directions(4.0), make_vec({-25.0, 0.0}));
  ThetaValue base = theta(l4, t);
  double worst = 0.0;
  for (double eps : {0.5, 0.1, 0.05}) {
    ThetaValue s = theta(l4, scale_density(t, eps));
    worst = std::max(worst, std::abs(eps * eps * s.theta - base.theta) / std::abs(base.theta));
  }
  return {worst < 1e-6, "max rel deviation " + fmt(worst)};
}

Outcome euclidean_theta() {
  Grid g = Grid::box(2, 8.0, 128);
  GridDensity rho = make_density(g, [](const Vec& x) { return std::exp(-x.squaredNorm() / 2.0); });
  ThetaValue t = theta(NormSpec::euclidean(2), rho);
  return {rel(t.numerator, -2.0) < 0.01, "numerator " + fmt(t.numerator)};
}

Outcome reverse_norm_quotient() {
  Rng rng(2026);
  double worst = 0.0;
  const auto pot = PotentialSpec::squared_reverse_norm();
  for (const auto& [name, n] : families()) {
    for (int k = 0; k < 1000; ++k) {
      Vec x = random_in_ball(rng, 2, 2.0), y = random_in_ball(rng, 2, 2.0);
      worst = std::max(worst, std::abs(skew_quotient(n, pot, x, y) - 1.0));
    }
  }
  return {worst < 1e-8, "max |q - 1| " + fmt(worst) + " over 6 families"};
}

Outcome witness() {
  auto w = witness_search(sheared_l8(), PotentialSpec::quadratic(Mat::Identity(2, 2), Vec::Zero(2)), 0.0);
  if (!w) return {false, "no witness found"};
  return {w->quotient < -0.01, "quotient " + fmt(w->quotient)};
}

Outcome contraction_equivalence() {
  const Vec zero = Vec::Zero(2);
  struct Combo {
    std::string name;
    NormSpec norm;
    PotentialSpec pot;
  };
  std::vector<Combo> combos{
      {"euclidean x quadratic", NormSpec::euclidean(2), PotentialSpec::quadratic(mat2(1.0, 0.0, 0.0, 3.0), zero)},
      {"l4 x reverse norm", NormSpec::regularized_p(4.0, 1e-3, 2), PotentialSpec::squared_reverse_norm()},
      {"shifted_ball x reverse norm", NormSpec::shifted_ball(make_vec({0.5, 0.0})),
       PotentialSpec::squared_reverse_norm()},
      {"quadratic x distance", NormSpec::quadratic(mat2(2.0, 0.5, 0.5, 1.0)),
       PotentialSpec::squared_distance(make_vec({0.5, -0.3}))},
      {"sheared_l8 x quadratic", sheared_l8(), PotentialSpec::quadratic(Mat::Identity(2, 2), zero)},
      {"l4 x quadratic", NormSpec::regularized_p(4.0, 1e-3, 2), PotentialSpec::quadratic(Mat::Identity(2, 2), zero)},
  };
  bool ok = true;
  std::ostringstream os;
  std::uint64_t seed = 11;
  for (const auto& c : combos) {
    SkewReport rep = skew_estimate(c.norm, c.pot, 512, 2.0, seed);
    double K = contraction_fit(c.norm, c.pot, 8, 1.0, 1e-3, seed, {rep.argmin_pair});
    double err = std::abs(K - rep.inf_quotient) / std::max(1.0, std::abs(rep.inf_quotient));
    ok = ok && err <= 0.05;
    os << c.name << ": inf " << fmt(rep.inf_quotient) << " fit " << fmt(K) << "; ";
    ++seed;
  }
  return {ok, os.str()};
}

Outcome heat_analytic() {
  const NormSpec n = l4_heat();
  auto run = [&](int cells, double& drift, bool& monotone) {
    Grid g = Grid::box(2, 6.0, cells);
    GridDensity u0 = gaussian_profile(n, Vec::Zero(2), 0.25, g);
    double limit = explicit_dt_limit(n, g);
    int stride = std::max(1, static_cast<int>(std::ceil(0.05 / limit)));
    DensityTrajectory tr = heat_solve(n, u0, HeatConfig{g, limit, 0.5, HeatScheme::ExplicitFlux, stride});
    double worst = 0.0;
    monotone = true;
    for (size_t k = 1; k < tr.frames.size(); ++k) {
      GridDensity exact = gaussian_profile(n, Vec::Zero(2), 0.25 + tr.times[k], g);
      worst = std::max(worst, relative_l1(tr.frames[k], exact));
      monotone = monotone && tr.diagnostics[k].entropy <= tr.diagnostics[k - 1].entropy;
    }
    drift = tr.max_step_drift;
    return worst;
  };
  double d64, d128;
  bool m64, m128;
  double e64 = run(64, d64, m64);
  double e128 = run(128, d128, m128);
  double ratio = e64 / e128;
  bool ok = e128 < 0.02 && std::max(d64, d128) < 1e-8 && m64 && m128 && ratio >= 3.5;
  return {ok, "L1 " + fmt(e128) + ", ratio " + fmt(ratio) + ", drift " + fmt(std::max(d64, d128)) +
                  (m64 && m128 ? ", entropy monotone" : ", entropy increased")};
}

Outcome dissipation() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& [name, n] : std::vector<Named>{{"euclidean", NormSpec::euclidean(2)}, {"l4", l4_heat()}}) {
    Grid g = Grid::box(2, 6.0, 64);
    GridDensity u0 = gaussian_profile(n, Vec::Zero(2), 0.25, g);
    // Step count a multiple of 6 so that t = 0.05 is a frame.
    const int steps = 6 * static_cast<int>(std::ceil(0.05 / explicit_dt_limit(n, g)));
    DensityTrajectory tr = heat_solve(n, u0, HeatConfig{g, 0.3 / steps, 0.3, HeatScheme::ExplicitFlux, 1});
    double res = entropy_dissipation_residual(tr, tr.times[frame_index(tr, 0.05)], 0.3);
    ok = ok && res < 0.02;
    os << name << " " << fmt(res) << "; ";
  }
  return {ok, "residuals " + os.str()};
}

Outcome w2_oracles() {
  Rng rng(77);
  Grid g = Grid::box(2, 1.0, 32);
  const NormSpec e = NormSpec::euclidean(2);
  std::uniform_real_distribution<double> width(0.02, 0.08), weight(0.3, 1.0);
  auto mixture = [&]() {
    std::vector<std::tuple<Vec, double, double>> comp;
    for (int k = 0; k < 3; ++k) comp.emplace_back(random_in_ball(rng, 2, 0.5), width(rng), weight(rng));
    return make_density(g, [comp](const Vec& x) {
      double s = 0.0;
      for (const auto& [c, w, m] : comp) s += m * std::exp(-(x - c).squaredNorm() / (2.0 * w));
      return s;
    });
  };
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    GridDensity a = mixture(), b = mixture();
    worst = std::max(worst, rel(w2_sinkhorn(e, a, b).cost, w2_exact(e, a, b).cost));
  }
  // Isotropic Gaussians: W2^2 = |m1 - m2|^2 + 2 (s1 - s2)^2 in the plane.
  Grid wide = Grid::box(2, 2.0, 32);
  const Vec m1 = make_vec({-0.4, 0.1}), m2 = make_vec({0.5, -0.2});
  const double s1 = 0.25, s2 = 0.4;
  auto gauss = [&](const Vec& m, double s) {
    return make_density(wide, [m, s](const Vec& x) { return std::exp(-(x - m).squaredNorm() / (2.0 * s * s)); });
  };
  double closed = (m1 - m2).squaredNorm() + 2.0 * (s1 - s2) * (s1 - s2);
  double cf = rel(w2_exact(e, gauss(m1, s1), gauss(m2, s2)).cost, closed);
  return {worst < 5e-3 && cf < 0.02, "sinkhorn max rel " + fmt(worst) + ", closed form rel " + fmt(cf)};
}

Outcome gaussian_contract() {
  ReportRecord r = gaussian_contract_demo(l4_heat(), GaussianContractParams{});
  return {r.pass, "max relative increase " + fmt(r.results["max_relative_increase"].get<double>())};
}

Outcome noncontraction() {
  NoncontractionParams prm;
  std::string detail;
  bool ok = true;
  try {
    ReportRecord r = noncontraction_demo(l4_heat(), prm);
    ok = r.pass && r.checks["slope_above_noise"].get<bool>();
    detail = "gap " + fmt(r.results["omega_gap_quadrature"].get<double>()) + ", slope " +
             fmt(r.results["slope"].get<double>()) + ", noise " + fmt(r.results["noise"].get<double>()) +
             (r.checks["all_K_violated"].get<bool>() ? ", all K violated" : ", some K satisfied");
  } catch (const Error& err) {
    return {false, std::string("l4 run: ") + err.what()};
  }
  try {
    ReportRecord c = noncontraction_demo(NormSpec::euclidean(2), prm);
    ok = ok && c.pass;
    detail += "; control slope " + fmt(c.results["slope"].get<double>());
  } catch (const Error& err) {
    return {false, detail + "; control run: " + err.what()};
  }
  return {ok, detail};
}

Outcome detector() {
  Rng rng(31);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  auto dir = [](double t) { return make_vec({std::cos(t), std::sin(t)}); };
  double quad_worst = 0.0;
  int triples = 0;
  for (const NormSpec& q : {NormSpec::euclidean(2), NormSpec::quadratic(mat2(2.0, 0.5, 0.5, 1.0))}) {
    int done = 0;
    while (done < 100) {
      try {
        Vec v = tangent_triangle_vector(q, dir(u(rng)), dir(u(rng)), dir(u(rng)));
        quad_worst = std::max(quad_worst, v.norm());
        ++done;
      } catch (const Error&) {
        // triple does not enclose the origin; draw again
      }
    }
    triples += done;
  }
  double m_ball = triangle_search(NormSpec::shifted_ball(make_vec({0.3, 0.0})), 36, true).magnitude;
  double m_l4 = triangle_search(NormSpec::regularized_p(4.0, 1e-3, 2), 36, true).magnitude;
  return {quad_worst < 1e-8 && m_ball > 1e-3 && m_l4 > 1e-3,
          "quadratic max " + fmt(quad_worst) + " over " + std::to_string(triples) + " triples, shifted_ball " +
              fmt(m_ball) + ", l4 " + fmt(m_l4)};
}

Outcome distance_skew() {
  double worst = INFINITY;
  for (const auto& [name, n] : families()) {
    DistanceSkewConfig cfg;
    cfg.r = 1.5;
    cfg.z = Vec::Zero(2);
    worst = std::min(worst, distance_skew_check(n, cfg, 256).inf_quotient);
  }
  return {worst >= 1.0 - 1e-6, "min inf quotient " + fmt(worst) + " over 6 families"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> all{
      {1, "step0 limit", 30, step0},
      {2, "theta scaling law", 1, scaling},
      {3, "euclidean theta control", 5, euclidean_theta},
      {4, "reverse-norm skew quotient", 5, reverse_norm_quotient},
      {5, "sheared l8 witness", 30, witness},
      {6, "contraction fit vs skew infimum", 120, contraction_equivalence},
      {7, "heat solver vs analytic flow", 300, heat_analytic},
      {8, "entropy dissipation identity", 120, dissipation},
      {9, "W2 oracles", 300, w2_oracles},
      {10, "gaussian non-expansion", 600, gaussian_contract},
      {11, "non-contraction", 900, noncontraction},
      {12, "inner-product detector", 60, detector},
      {13, "distance skew convexity", 30, distance_skew},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_budget = secs < c.budget_s;
    bool pass = o.pass && in_budget;
    if (!pass) ++failed;
    std::printf("%s [%2d] %s (%.2fs%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                in_budget ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
