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


#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "minkflow/entropy.hpp"
#include "minkflow/experiments.hpp"
#include "minkflow/flows.hpp"
#include "minkflow/heat.hpp"
#include "minkflow/io.hpp"
#include "minkflow/transport.hpp"
#include "minkflow/triangle.hpp"

using namespace minkflow;
namespace fs = std::filesystem;

namespace {

enum Exit { kPass = 0, kFail = 1, kBadConfig = 2, kNumerical = 3 };

void print(const Json& doc) { std::cout << doc.dump(2) << "\n"; }

int report(const ReportRecord& r, const std::string& out) {
  if (!out.empty()) write_artifacts(r, out);
  print(r.to_json());
  return r.pass ? kPass : kFail;
}

Vec to_vec(const std::vector<double>& v) {
  if (v.empty() || v.size() > static_cast<size_t>(kMaxDim)) {
    throw Error(ErrorKind::InvalidConfig, "vector needs 1 to " + std::to_string(kMaxDim) + " entries");
  }
  Vec x(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i];
  return x;
}

/// Tent spec {"kind": "triangle", "p", "R", "eps"} under the given planar norm.
TentDensity tent_from_json(const NormSpec& norm, const Json& doc) {
  double p = doc.value("p", 4.0), R = doc.value("R", 0.0), eps = doc.value("eps", 1.0);
  return scale_density(make_tent(norm, step0_directions(p), make_vec({-R, 0.0})), eps);
}

bool is_triangle_spec(const Json& doc) { return doc.contains("kind") && doc["kind"] == "triangle"; }

/// Initial data for the heat command: a density file, or a profile spec sampled on `grid`.
GridDensity initial_density(const NormSpec& norm, const std::string& init, const std::string& grid_spec) {
  Json doc = load_json(init);
  if (!doc.contains("kind")) return read_density(init);
  if (grid_spec.empty()) throw Error(ErrorKind::InvalidConfig, "profile initial data needs --grid");
  Grid g = grid_from_json(load_json(grid_spec));
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "gaussian") {
    Vec c = doc.contains("center") ? vec_from_json(doc["center"], "center") : Vec(Vec::Zero(g.dim));
    return gaussian_profile(norm, c, doc.value("a", 0.25), g);
  }
  if (kind == "triangle") {
    TentDensity t = tent_from_json(norm, doc);
    double radius = doc.value("mollify_cells", 2.0) * g.h(0);
    return make_density(g, mollified_profile(t.profile(), 2, radius));
  }
  throw Error(ErrorKind::InvalidConfig, "unknown profile kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minkflow: Minkowski norms, Wasserstein transport and nonlinear heat flow"};
  app.require_subcommand(1);
  std::function<int()> action;

  // norm info
  auto* norm_cmd = app.add_subcommand("norm", "Norm utilities");
  norm_cmd->require_subcommand(1);
  auto* norm_info = norm_cmd->add_subcommand("info", "Ellipticity and uniform constants of a norm");
  std::string spec_path;
  int samples = 256;
  norm_info->add_option("--spec", spec_path, "Norm spec file or inline JSON")->required();
  norm_info->add_option("--samples", samples, "Angular samples");
  norm_info->callback([&] {
    action = [&] {
      NormSpec n = load_norm(spec_path);
      EllipticityBounds eb = ellipticity_bounds(n, samples);
      UniformConstants uc = uniform_constants(n, std::max(samples, 16));
      print({{"lambda_lo", eb.lambda_lo}, {"lambda_hi", eb.lambda_hi}, {"c_const", uc.c_const},
             {"s_const", uc.s_const}});
      return kPass;
    };
  });

  // flow run
  auto* flow_cmd = app.add_subcommand("flow", "Gradient curves");
  flow_cmd->require_subcommand(1);
  auto* flow_run = flow_cmd->add_subcommand("run", "Integrate a gradient curve of a potential");
  std::string norm_path, pot_path, out_path;
  std::vector<double> x0;
  double t_end = 1.0, dt = 1e-3;
  flow_run->add_option("--norm", norm_path, "Norm spec")->required();
  flow_run->add_option("--potential", pot_path, "Potential spec")->required();
  flow_run->add_option("--x0", x0, "Initial point")->required()->expected(1, kMaxDim);
  flow_run->add_option("--t-end", t_end, "Final time");
  flow_run->add_option("--dt", dt, "Step");
  flow_run->add_option("--out", out_path, "CSV output")->required();
  flow_run->callback([&] {
    action = [&] {
      NormSpec n = load_norm(norm_path);
      Trajectory tr = gradient_curve(n, load_potential(pot_path, n.dim()), to_vec(x0), t_end, dt);
      write_trajectory_csv(tr, out_path);
      print({{"steps", tr.times.size() - 1}, {"substeps", tr.substeps}, {"final", vec_to_json(tr.states.back())}});
      return kPass;
    };
  });

  // skew check
  auto* skew_cmd = app.add_subcommand("skew", "Skew convexity");
  skew_cmd->require_subcommand(1);
  auto* skew_check = skew_cmd->add_subcommand("check", "Infimum of the skew quotient and fitted contraction rate");
  int pairs = 4096, fit_pairs = 32;
  double radius = 2.0;
  std::uint64_t seed = 0;
  skew_check->add_option("--norm", norm_path, "Norm spec")->required();
  skew_check->add_option("--potential", pot_path, "Potential spec")->required();
  skew_check->add_option("--pairs", pairs, "Sampled pairs");
  skew_check->add_option("--radius", radius, "Sampling radius");
  skew_check->add_option("--seed", seed, "Seed");
  skew_check->add_option("--fit-pairs", fit_pairs, "Pairs integrated for the contraction fit");
  skew_check->callback([&] {
    action = [&] {
      NormSpec n = load_norm(norm_path);
      PotentialSpec pot = load_potential(pot_path, n.dim());
      SkewReport s = skew_estimate(n, pot, pairs, radius, seed);
      double K = contraction_fit(n, pot, fit_pairs, 1.0, 1e-3, seed, {s.argmin_pair}, radius);
      print({{"inf_quotient", s.inf_quotient},
             {"argmin_pair", {vec_to_json(s.argmin_pair.first), vec_to_json(s.argmin_pair.second)}},
             {"fitted_K", K}});
      return kPass;
    };
  });

  // w2
  auto* w2_cmd = app.add_subcommand("w2", "Wasserstein distance between two density files");
  std::string mu_path, nu_path, method = "exact";
  double eps_final = 0.0;
  w2_cmd->add_option("--norm", norm_path, "Norm spec")->required();
  w2_cmd->add_option("--mu", mu_path, "Source density")->required();
  w2_cmd->add_option("--nu", nu_path, "Target density")->required();
  w2_cmd->add_option("--method", method, "exact or sinkhorn")->check(CLI::IsMember({"exact", "sinkhorn"}));
  w2_cmd->add_option("--eps-final", eps_final, "Final Sinkhorn regularization (0: automatic)");
  w2_cmd->callback([&] {
    action = [&] {
      NormSpec n = load_norm(norm_path);
      GridDensity mu = read_density(mu_path), nu = read_density(nu_path);
      SinkhornOptions opt;
      opt.eps_final = eps_final;
      TransportPlan p = method == "exact" ? w2_exact(n, mu, nu) : w2_sinkhorn(n, mu, nu, opt);
      print({{"cost", p.cost}, {"w2", p.w2()}, {"marginal_err", p.marginal_err}});
      return kPass;
    };
  });

  // theta
  auto* theta_cmd = app.add_subcommand("theta", "Theta of a density file or a triangle spec");
  std::string density_path;
  theta_cmd->add_option("--norm", norm_path, "Norm spec")->required();
  theta_cmd->add_option("--density", density_path, "Density file or {\"kind\": \"triangle\", ...}")->required();
  theta_cmd->callback([&] {
    action = [&] {
      NormSpec n = load_norm(norm_path);
      Json doc = load_json(density_path);
      ThetaValue th = is_triangle_spec(doc) ? theta(n, tent_from_json(n, doc)) : theta(n, read_density(density_path));
      print({{"theta", th.theta}, {"numerator", th.numerator}, {"second_moment", th.second_moment}});
      return kPass;
    };
  });

  // heat run
  auto* heat_cmd = app.add_subcommand("heat", "Nonlinear heat flow");
  heat_cmd->require_subcommand(1);
  auto* heat_run = heat_cmd->add_subcommand("run", "Evolve a density and write frames and diagnostics");
  std::string init, grid_spec, out_dir, csv_path, scheme = "explicit";
  int stride = 1;
  dt = 0.0;
  heat_run->add_option("--norm", norm_path, "Norm spec")->required();
  heat_run->add_option("--init", init, "Density file or profile spec")->required();
  heat_run->add_option("--dt", dt, "Step (0: explicit limit)");
  heat_run->add_option("--t-end", t_end, "Final time")->required();
  heat_run->add_option("--grid", grid_spec, "Grid spec {dim, lo, hi, m} for profile data");
  heat_run->add_option("--out-dir", out_dir, "Directory for frame files");
  heat_run->add_option("--csv", csv_path, "Diagnostics CSV");
  heat_run->add_option("--scheme", scheme, "explicit or semi-implicit")
      ->check(CLI::IsMember({"explicit", "semi-implicit"}));
  heat_run->add_option("--stride", stride, "Steps between frames");
  heat_run->callback([&] {
    action = [&] {
      NormSpec n = load_norm(norm_path);
      GridDensity u0 = initial_density(n, init, grid_spec);
      HeatConfig cfg{u0.grid, dt > 0.0 ? dt : explicit_dt_limit(n, u0.grid), t_end,
                     scheme == "explicit" ? HeatScheme::ExplicitFlux : HeatScheme::SemiImplicitFrozen, stride};
      DensityTrajectory tr = heat_solve(n, u0, cfg);
      if (!csv_path.empty()) write_series_csv(tr, csv_path);
      if (!out_dir.empty()) {
        for (size_t k = 0; k < tr.frames.size(); ++k) {
          char name[32];
          std::snprintf(name, sizeof name, "frame_%05zu.json", k);
          write_density(tr.frames[k], (fs::path(out_dir) / name).string());
        }
      }
      print({{"steps", tr.steps}, {"dt", tr.dt}, {"frames", tr.frames.size()},
             {"final_mass", tr.diagnostics.back().mass}, {"max_step_drift", tr.max_step_drift},
             {"clipped_mass", tr.clipped_mass}});
      return kPass;
    };
  });

  // experiments
  std::string exp_out;
  auto* nc = app.add_subcommand("noncontract", "Initial W2 slope between a tent flow and its contraction");
  NoncontractionParams ncp;
  nc->add_option("--norm", norm_path, "Norm spec")->required();
  nc->add_option("--p", ncp.p, "Exponent of the tent directions");
  nc->add_option("--eps", ncp.eps, "Density scale");
  nc->add_option("--R", ncp.R, "Tent shift");
  nc->add_option("--T", ncp.T, "Contraction parameter");
  nc->add_option("--spacing", ncp.h, "Grid spacing");
  nc->add_option("--dt", ncp.dt, "Step (0: explicit limit)");
  nc->add_option("--out", exp_out, "Artifact directory");
  nc->callback([&] { action = [&] { return report(noncontraction_demo(load_norm(norm_path), ncp), exp_out); }; });

  auto* ts = app.add_subcommand("triangle-search", "Tangent-triangle inner-product detector");
  int angular = 48;
  bool no_refine = false;
  ts->add_option("--norm", norm_path, "Planar norm spec")->required();
  ts->add_option("--angular-grid", angular, "Directions per sweep");
  ts->add_flag("--no-refine", no_refine, "Skip the local refinement");
  ts->add_option("--out", exp_out, "Artifact directory");
  ts->callback([&] {
    action = [&] { return report(triangle_search_report(load_norm(norm_path), angular, !no_refine), exp_out); };
  });

  auto* s0 = app.add_subcommand("step0", "Theta numerator of the shifted tent over R");
  double p = 4.0, eps_norm = 0.0;
  std::vector<double> R_list{25.0, 50.0, 100.0};
  s0->add_option("--p", p, "Exponent");
  s0->add_option("--R", R_list, "Shifts, increasing");
  s0->add_option("--eps-norm", eps_norm, "Regularization of the l_p norm");
  s0->add_option("--out", exp_out, "Artifact directory");
  s0->callback([&] { action = [&] { return report(step0_report(p, R_list, eps_norm), exp_out); }; });

  auto* gc = app.add_subcommand("gaussian-contract", "W2 between heat flows of two Gaussian profiles");
  GaussianContractParams gcp;
  std::vector<double> z{1.0, 0.0};
  gc->add_option("--norm", norm_path, "Symmetric norm spec")->required();
  gc->add_option("--a", gcp.a, "Width of the first profile");
  gc->add_option("--b", gcp.b, "Width of the second profile");
  gc->add_option("--z", z, "Centre of the second profile")->expected(1, kMaxDim);
  gc->add_option("--t-max", gcp.t_max, "Final time");
  gc->add_option("--grid", grid_spec, "Grid spec");
  gc->add_option("--dt", gcp.dt, "Step (0: explicit limit)");
  gc->add_option("--frame-dt", gcp.frame_dt, "Spacing of W2 samples");
  gc->add_flag("--analytic", gcp.analytic, "Use the closed-form evolution");
  gc->add_option("--out", exp_out, "Artifact directory");
  gc->callback([&] {
    action = [&] {
      gcp.z = to_vec(z);
      if (!grid_spec.empty()) gcp.grid = grid_from_json(load_json(grid_spec));
      return report(gaussian_contract_demo(load_norm(norm_path), gcp), exp_out);
    };
  });

  auto* lf = app.add_subcommand("lift", "Theta of the cut-off lift to three dimensions");
  std::vector<double> lift_R{16.0, 64.0, 256.0};
  double lift_eps = 1e-3;
  lf->add_option("--p", p, "Exponent");
  lf->add_option("--eps-norm", lift_eps, "Regularization of the 3D norm");
  lf->add_option("--R", lift_R, "Shifts");
  lf->add_option("--out", exp_out, "Artifact directory");
  lf->callback([&] { action = [&] { return report(lift_report(p, lift_eps, lift_R), exp_out); }; });

  auto* run = app.add_subcommand("run", "Run an experiment config");
  std::string config;
  run->add_option("--config", config, "Config file")->required();
  run->add_option("--out", exp_out, "Artifact directory (overrides the config)");
  run->callback([&] {
    action = [&] {
      ReportRecord r = run_config(config, exp_out);
      print(r.to_json());
      return r.pass ? kPass : kFail;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kBadConfig;
  }
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidConfig ? kBadConfig : kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
