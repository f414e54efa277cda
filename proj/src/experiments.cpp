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


#include "minkflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "minkflow/transport.hpp"

namespace minkflow {

namespace {

/// Drops values below rel * max and renormalizes; keeps exact-solver supports small.
GridDensity trim(const GridDensity& d, double rel) {
  std::vector<double> v = d.values;
  const double cut = rel * d.max_value();
  for (double& x : v) {
    if (x < cut) x = 0.0;
  }
  return make_density(d.grid, v);
}

long support_size(const GridDensity& d) {
  return std::count_if(d.values.begin(), d.values.end(), [](double v) { return v > 0.0; });
}

/// W2^2 on trimmed copies; the cut grows tenfold until both supports fit the exact solver.
double trimmed_w2_sq(const NormSpec& norm, const GridDensity& a, const GridDensity& b, double rel, double& used) {
  for (double cut = rel; cut < 1e-3; cut *= 10.0) {
    GridDensity ta = trim(a, cut), tb = trim(b, cut);
    if (support_size(ta) <= kMaxExactSupport && support_size(tb) <= kMaxExactSupport) {
      used = std::max(used, cut);
      return w2_exact(norm, ta, tb).cost;
    }
  }
  throw Error(ErrorKind::SupportTooLarge, "frames do not fit the exact solver after trimming");
}

/// Per-row estimate of d/dt of `y`: one-sided second order at the ends, centred inside.
std::vector<double> derivative_estimates(const std::vector<double>& t, const std::vector<double>& y) {
  const size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (t[1] - t[0]);
    return d;
  }
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (t[2] - t[0]);
  for (size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k - 1]) / (t[k + 1] - t[k - 1]);
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (t[n - 1] - t[n - 3]);
  return d;
}

void flow_table(ReportRecord& r, const std::vector<double>& t, const std::vector<double>& w2_sq) {
  std::vector<double> half(w2_sq.size());
  for (size_t k = 0; k < w2_sq.size(); ++k) half[k] = 0.5 * w2_sq[k];
  std::vector<double> slope = derivative_estimates(t, half);
  r.columns = {"t", "w2", "w2_sq", "slope_estimate"};
  for (size_t k = 0; k < t.size(); ++k) r.table.push_back({t[k], std::sqrt(w2_sq[k]), w2_sq[k], slope[k]});
}

bool is_quadratic(const NormSpec& norm) { return norm.family() == NormFamily::Quadratic; }

std::vector<double> number_list(const Json& doc, const char* key, std::vector<double> fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc[key].get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidConfig, std::string("'") + key + "' must be a list of numbers");
  }
}

template <class T>
T param(const Json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidConfig, std::string("parameter '") + key + "' has the wrong type");
  }
}

}  // namespace

Json ReportRecord::to_json() const {
  Json doc;
  doc["experiment"] = experiment;
  doc["input"] = input;
  doc["results"] = results;
  doc["checks"] = checks;
  doc["pass"] = pass;
  return doc;
}

ReportRecord noncontraction_demo(const NormSpec& norm, const NoncontractionParams& prm) {
  if (norm.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "the demo runs in the plane");
  if (!(prm.eps > 0.0) || !(prm.h > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps and h must be > 0");
  if (!(prm.T > 1.0)) throw Error(ErrorKind::DegenerateScale, "T must exceed 1");
  if (prm.frames < 4 || prm.frame_steps < 1) throw Error(ErrorKind::InvalidArgument, "need >= 4 frames of >= 1 step");
  ReportRecord r;
  r.experiment = "noncontract";
  r.input = {{"norm", norm_to_json(norm)}, {"p", prm.p}, {"eps", prm.eps}, {"R", prm.R}, {"T", prm.T},
             {"h", prm.h}, {"frame_steps", prm.frame_steps}, {"frames", prm.frames}, {"dt", prm.dt},
             {"mollify_cells", prm.mollify_cells}, {"trim", prm.trim}, {"K_sweep", prm.K_sweep}};
  const bool control = is_quadratic(norm);

  TentDensity tent = scale_density(make_tent(norm, step0_directions(prm.p), make_vec({-prm.R, 0.0})), prm.eps);
  ThetaValue th = theta(norm, tent);
  const double gap_quad = th.numerator / (prm.T * (prm.T - 1.0));

  // Box around both supports with room for the mollifier and the spread of the explicit steps.
  const double lam = 1.0 - 1.0 / prm.T;
  const double margin = (prm.mollify_cells + prm.frames * prm.frame_steps + 8) * prm.h;
  std::vector<double> lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
  for (const Vec& v : tent.support()) {
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min({lo[a], v(a), lam * v(a)});
      hi[a] = std::max({hi[a], v(a), lam * v(a)});
    }
  }
  std::vector<int> m(2);
  for (int a = 0; a < 2; ++a) {
    lo[a] -= margin;
    m[a] = static_cast<int>(std::ceil((hi[a] + margin - lo[a]) / prm.h));
    hi[a] = lo[a] + m[a] * prm.h;
  }
  Grid g = Grid::make(lo, hi, m);

  Profile mp = mollified_profile(tent.profile(), 2, prm.mollify_cells * prm.h);
  GridDensity mu0 = make_density(g, mp);
  GridDensity nu0 = make_density(g, [&](const Vec& x) { return mp(x / lam); });
  OmegaGap grid_gap = contraction_omega_gap(norm, mu0, prm.T);

  const double limit = explicit_dt_limit(norm, g);
  const double dt = prm.dt > 0.0 ? prm.dt : limit;
  HeatConfig cfg{g, dt, prm.frames * prm.frame_steps * dt, HeatScheme::ExplicitFlux, prm.frame_steps};
  DensityTrajectory ta = heat_solve(norm, mu0, cfg);
  DensityTrajectory tb = heat_solve(norm, nu0, cfg);

  std::vector<double> t, w2sq;
  double trim_used = 0.0;
  for (size_t k = 0; k < ta.frames.size(); ++k) {
    t.push_back(ta.times[k]);
    w2sq.push_back(trimmed_w2_sq(norm, ta.frames[k], tb.frames[k], prm.trim, trim_used));
  }
  const double D = t[1] - t[0];
  const double s1 = (-3.0 * w2sq[0] + 4.0 * w2sq[1] - w2sq[2]) / (4.0 * D);
  const double s2 = (-3.0 * w2sq[0] + 4.0 * w2sq[2] - w2sq[4]) / (8.0 * D);
  const double noise = std::abs(s1 - s2);
  if (std::abs(s1) < 3.0 * noise) {
    throw Error(ErrorKind::InconclusiveSlope, "slope " + std::to_string(s1) + " within 3x noise " + std::to_string(noise));
  }
  flow_table(r, t, w2sq);

  Json sweep = Json::array();
  bool all_violated = true;
  for (double K : prm.K_sweep) {
    double worst = -INFINITY, at = 0.0;
    for (size_t k = 1; k < t.size(); ++k) {
      double excess = std::sqrt(w2sq[k]) - std::exp(-K * t[k]) * std::sqrt(w2sq[0]);
      if (excess > worst) worst = excess, at = t[k];
    }
    bool violated = worst > 0.0;
    all_violated = all_violated && violated;
    sweep.push_back({{"K", K}, {"violated", violated}, {"max_excess", worst}, {"at", at}});
  }

  r.results = {{"control", control},
               {"theta", th.theta},
               {"numerator", th.numerator},
               {"second_moment", th.second_moment},
               {"omega_gap_quadrature", gap_quad},
               {"omega_gap_grid", grid_gap.gap},
               {"mollification_gap", grid_gap.gap - gap_quad},
               {"w2_sq0", w2sq[0]},
               {"slope", s1},
               {"slope_2dt", s2},
               {"noise", noise},
               {"log_rate", s1 / w2sq[0]},
               {"K_sweep", sweep},
               {"grid", grid_to_json(g)},
               {"dt", dt},
               {"clipped_mass", ta.clipped_mass + tb.clipped_mass},
               {"trim_used", trim_used}};
  if (control) {
    r.checks["slope_nonpositive"] = s1 <= 0.0;
    r.pass = s1 <= 0.0;
  } else {
    r.checks["omega_gap_positive"] = gap_quad > 0.0;
    r.checks["slope_positive"] = s1 > 0.0;
    r.checks["slope_above_noise"] = std::abs(s1) > 3.0 * noise;
    r.checks["all_K_violated"] = all_violated;
    r.pass = gap_quad > 0.0 && s1 > 0.0 && all_violated;
  }
  return r;
}

ReportRecord gaussian_contract_demo(const NormSpec& norm, const GaussianContractParams& prm) {
  if (!is_symmetric(norm)) throw Error(ErrorKind::AsymmetricNorm, "Gaussian non-expansion needs a symmetric norm");
  if (!(prm.a > 0.0) || !(prm.b > 0.0)) throw Error(ErrorKind::InvalidArgument, "a and b must be > 0");
  if (!(prm.frame_dt > 0.0) || !(prm.t_max >= prm.frame_dt)) {
    throw Error(ErrorKind::InvalidArgument, "need 0 < frame_dt <= t_max");
  }
  const Grid& g = prm.grid;
  ReportRecord r;
  r.experiment = "gaussian-contract";
  r.input = {{"norm", norm_to_json(norm)}, {"a", prm.a},           {"b", prm.b},
             {"z", vec_to_json(prm.z)},     {"t_max", prm.t_max},   {"grid", grid_to_json(g)},
             {"dt", prm.dt},                {"frame_dt", prm.frame_dt}, {"coarsen", prm.coarsen},
             {"analytic", prm.analytic},    {"tolerance", prm.tolerance}};
  const Vec origin = Vec::Zero(g.dim);
  const int nframes = static_cast<int>(std::lround(prm.t_max / prm.frame_dt));
  std::vector<GridDensity> fa, fb;
  std::vector<double> t;
  double dt = 0.0;
  if (prm.analytic) {
    for (int k = 0; k <= nframes; ++k) {
      double tk = k * prm.frame_dt;
      t.push_back(tk);
      fa.push_back(gaussian_profile(norm, origin, prm.a + tk, g));
      fb.push_back(gaussian_profile(norm, prm.z, prm.b + tk, g));
    }
  } else {
    double target = prm.dt > 0.0 ? prm.dt : explicit_dt_limit(norm, g);
    int sub = static_cast<int>(std::ceil(prm.frame_dt / target - 1e-9));
    dt = prm.frame_dt / sub;
    HeatConfig cfg{g, dt, nframes * prm.frame_dt, HeatScheme::ExplicitFlux, sub};
    DensityTrajectory ta = heat_solve(norm, gaussian_profile(norm, origin, prm.a, g), cfg);
    DensityTrajectory tb = heat_solve(norm, gaussian_profile(norm, prm.z, prm.b, g), cfg);
    t = ta.times;
    fa = std::move(ta.frames);
    fb = std::move(tb.frames);
    r.results["max_step_drift"] = std::max(ta.max_step_drift, tb.max_step_drift);
  }
  std::vector<double> w2sq;
  double trim_used = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    GridDensity a = prm.coarsen > 1 ? coarsen(fa[k], prm.coarsen) : fa[k];
    GridDensity b = prm.coarsen > 1 ? coarsen(fb[k], prm.coarsen) : fb[k];
    w2sq.push_back(trimmed_w2_sq(norm, a, b, 1e-12, trim_used));
  }
  r.results["trim_used"] = trim_used;
  flow_table(r, t, w2sq);
  double run_min = std::sqrt(w2sq[0]), worst = 0.0;
  for (size_t k = 1; k < w2sq.size(); ++k) {
    double w = std::sqrt(w2sq[k]);
    worst = std::max(worst, w / run_min - 1.0);
    run_min = std::min(run_min, w);
  }
  r.results["w2_initial"] = std::sqrt(w2sq.front());
  r.results["w2_final"] = std::sqrt(w2sq.back());
  r.results["max_relative_increase"] = worst;
  r.results["dt"] = dt;
  r.checks["nonincreasing"] = worst <= prm.tolerance;
  r.pass = worst <= prm.tolerance;
  return r;
}

ReportRecord triangle_search_report(const NormSpec& norm2d, int angular_grid, bool refine) {
  ReportRecord r;
  r.experiment = "triangle-search";
  r.input = {{"norm", norm_to_json(norm2d)}, {"angular_grid", angular_grid}, {"refine", refine}};
  TriangleSearchResult s = triangle_search(norm2d, angular_grid, refine);
  const char* verdict = s.verdict == DetectorVerdict::NonInnerProduct ? "non_inner_product"
                        : s.verdict == DetectorVerdict::InnerProduct  ? "inner_product"
                                                                      : "inconclusive";
  r.results = {{"magnitude", s.magnitude},
               {"verdict", verdict},
               {"triples", s.triples},
               {"vertices", {vec_to_json(s.best.A), vec_to_json(s.best.B), vec_to_json(s.best.C)}},
               {"tangent_points", {vec_to_json(s.best.a), vec_to_json(s.best.b), vec_to_json(s.best.c)}},
               {"vector", vec_to_json(s.best.weighted_vector())}};
  if (is_quadratic(norm2d)) {
    r.checks["below_1e-8"] = s.magnitude < 1e-8;
    r.pass = s.magnitude < 1e-8;
  } else {
    r.checks["above_1e-3"] = s.magnitude > 1e-3;
    r.pass = s.magnitude > 1e-3;
  }
  return r;
}

ReportRecord step0_report(double p, const std::vector<double>& R_list, double eps_norm) {
  ReportRecord r;
  r.experiment = "step0";
  r.input = {{"p", p}, {"R", R_list}, {"eps_norm", eps_norm}};
  Step0Table tab = step0_limit(p, R_list, eps_norm);
  r.columns = {"R", "value", "limit", "rel_error"};
  for (const auto& row : tab.rows) r.table.push_back({row.R, row.value, tab.limit, row.rel_error});
  const double last = tab.rows.empty() ? INFINITY : tab.rows.back().rel_error;
  r.results = {{"limit", tab.limit}, {"final_rel_error", last}, {"monotone", tab.monotone}};
  r.checks["monotone"] = tab.monotone;
  r.checks["within_5_percent"] = last < 0.05;
  r.pass = tab.monotone && last < 0.05;
  return r;
}

ReportRecord lift_report(double p, double eps_norm, const std::vector<double>& R_list) {
  ReportRecord r;
  r.experiment = "lift";
  r.input = {{"p", p}, {"eps_norm", eps_norm}, {"R", R_list}};
  NormSpec n3 = NormSpec::regularized_p(p, eps_norm, 3);
  r.columns = {"R", "theta", "mass", "boundary_share"};
  bool positive = true, mass_ok = true, shrinking = true;
  double prev_share = INFINITY;
  for (double R : R_list) {
    LiftedDensity L = lift_density(triangle_density(p, R), R);
    ThetaValue th = theta(n3, L, ThetaOptions{12, 2});
    double mass = L.mass(), share = L.cut.boundary_share();
    r.table.push_back({R, th.theta, mass, share});
    positive = positive && th.theta > 0.0;
    mass_ok = mass_ok && std::abs(mass - 1.0) < 1e-8;
    shrinking = shrinking && share < prev_share;
    prev_share = share;
  }
  r.checks["theta_positive"] = positive;
  r.checks["unit_mass"] = mass_ok;
  r.checks["boundary_share_decreasing"] = shrinking;
  r.pass = positive && mass_ok && shrinking;
  return r;
}

void write_artifacts(const ReportRecord& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  save_json(report.to_json(), (fs::path(out_dir) / "report.json").string());
  if (report.table.empty()) return;
  {
    std::ofstream out(fs::path(out_dir) / "trace.csv");
    for (size_t c = 0; c < report.columns.size(); ++c) out << (c ? "," : "") << report.columns[c];
    out << "\n";
    char buf[40];
    for (const auto& row : report.table) {
      for (size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", row[c]);
        out << (c ? "," : "") << buf;
      }
      out << "\n";
    }
  }
  std::vector<double> x;
  for (const auto& row : report.table) x.push_back(row[0]);
  std::vector<Series> series;
  // Plot the second column (w2 for the flow traces) and any column sharing its scale.
  for (size_t c = 1; c < report.columns.size() && c < 2; ++c) {
    Series s{report.columns[c], {}};
    for (const auto& row : report.table) s.y.push_back(row[c]);
    series.push_back(std::move(s));
  }
  if (report.experiment == "step0") {
    Series s{"limit", {}};
    for (const auto& row : report.table) s.y.push_back(row[2]);
    series.push_back(std::move(s));
  }
  std::ofstream svg(fs::path(out_dir) / "plot.svg");
  svg << svg_line_chart(x, series, report.columns[0], report.columns[1]);
}

ReportRecord run_config(const std::string& path, const std::string& out_override) {
  Json cfg = load_json(path);
  if (!cfg.is_object() || !cfg.contains("experiment") || !cfg["experiment"].is_string()) {
    throw Error(ErrorKind::InvalidConfig, "config needs an 'experiment' string");
  }
  std::string kind = cfg["experiment"].get<std::string>();
  std::replace(kind.begin(), kind.end(), '_', '-');
  const Json prm = cfg.contains("params") ? cfg["params"] : Json::object();
  if (!prm.is_object()) throw Error(ErrorKind::InvalidConfig, "'params' must be an object");

  auto norm = [&]() -> NormSpec {
    if (!cfg.contains("norm")) throw Error(ErrorKind::InvalidConfig, "config needs a 'norm'");
    if (cfg["norm"].is_string()) {
      namespace fs = std::filesystem;
      fs::path p = cfg["norm"].get<std::string>();
      if (p.is_relative() && !(path.size() && path.front() == '{')) p = fs::path(path).parent_path() / p;
      return load_norm(p.string());
    }
    return norm_from_json(cfg["norm"]);
  };

  ReportRecord r;
  if (kind == "noncontract") {
    NoncontractionParams p;
    p.p = param(prm, "p", p.p);
    p.eps = param(prm, "eps", p.eps);
    p.R = param(prm, "R", p.R);
    p.T = param(prm, "T", p.T);
    p.h = param(prm, "h", p.h);
    p.frame_steps = param(prm, "frame_steps", p.frame_steps);
    p.frames = param(prm, "frames", p.frames);
    p.dt = param(prm, "dt", p.dt);
    p.mollify_cells = param(prm, "mollify_cells", p.mollify_cells);
    p.K_sweep = number_list(prm, "K_sweep", p.K_sweep);
    r = noncontraction_demo(norm(), p);
  } else if (kind == "gaussian-contract") {
    GaussianContractParams p;
    p.a = param(prm, "a", p.a);
    p.b = param(prm, "b", p.b);
    if (prm.contains("z")) p.z = vec_from_json(prm["z"], "params.z");
    p.t_max = param(prm, "t_max", p.t_max);
    if (prm.contains("grid")) p.grid = grid_from_json(prm["grid"]);
    p.dt = param(prm, "dt", p.dt);
    p.frame_dt = param(prm, "frame_dt", p.frame_dt);
    p.coarsen = param(prm, "coarsen", p.coarsen);
    p.analytic = param(prm, "analytic", p.analytic);
    p.tolerance = param(prm, "tolerance", p.tolerance);
    r = gaussian_contract_demo(norm(), p);
  } else if (kind == "triangle-search") {
    r = triangle_search_report(norm(), param(prm, "angular_grid", 48), param(prm, "refine", true));
  } else if (kind == "step0") {
    r = step0_report(param(prm, "p", 4.0), number_list(prm, "R", {25.0, 50.0, 100.0}), param(prm, "eps_norm", 0.0));
  } else if (kind == "lift") {
    r = lift_report(param(prm, "p", 4.0), param(prm, "eps_norm", 1e-3), number_list(prm, "R", {16.0, 64.0, 256.0}));
  } else {
    throw Error(ErrorKind::InvalidConfig, "unknown experiment '" + kind + "'");
  }
  r.input["seed"] = cfg.contains("seed") ? cfg["seed"] : Json(0);
  std::string out = out_override;
  if (out.empty() && cfg.contains("out") && cfg["out"].is_string()) out = cfg["out"].get<std::string>();
  if (!out.empty()) write_artifacts(r, out);
  return r;
}

}  // namespace minkflow
