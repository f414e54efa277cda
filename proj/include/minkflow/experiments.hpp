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


#pragma once

#include <string>
#include <vector>

#include "minkflow/io.hpp"
#include "minkflow/triangle.hpp"

namespace minkflow {

/// Outcome of one experiment. `table` holds the trace (for the flow demos the columns are
/// t, w2, w2_sq, slope_estimate); the first column is the x axis of the plot.
struct ReportRecord {
  std::string experiment;
  Json input;
  Json results = Json::object();
  Json checks = Json::object();  // name -> bool
  bool pass = false;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> table;

  Json to_json() const;
};

struct NoncontractionParams {
  double p = 4.0;
  double eps = 0.05;  // density scale
  double R = 8.0;     // tent shift before scaling
  double T = 1.5;     // contraction geodesic parameter, nu0 at s = 1
  double h = 0.004;   // grid spacing of the boxes built around both supports
  int frame_steps = 4;
  int frames = 4;   // frames after t = 0; the slope uses frames 0-1-2 and 0-2-4
  double dt = 0.0;  // 0 picks the explicit limit
  double mollify_cells = 2.0;
  double trim = 1e-9;  // values below trim * max are dropped before the exact solver
  std::vector<double> K_sweep{-10.0, 0.0, 10.0};
};

/// Heat flows of a mollified scaled tent and its contraction; measures the initial slope of
/// W2^2/2 and compares with the quadrature gap. A quadratic norm is treated as the control run
/// (passes when the slope is <= 0). Throws InconclusiveSlope when |slope| < 3 * noise.
ReportRecord noncontraction_demo(const NormSpec& norm, const NoncontractionParams& prm);

struct GaussianContractParams {
  double a = 0.25;
  double b = 0.5;
  Vec z = make_vec({1.0, 0.0});
  double t_max = 0.5;
  Grid grid = Grid::box(2, 9.0, 96);
  double dt = 0.0;         // 0 picks the explicit limit
  double frame_dt = 0.05;  // spacing of the W2 samples
  int coarsen = 2;         // frames are coarsened before the exact solver
  bool analytic = false;   // use the closed-form evolution instead of the solver
  double tolerance = 5e-3;
};

/// W2 between the heat flows of exp(-||x||^2/4a) and exp(-||x - z||^2/4b); passes when the
/// trace never exceeds (1 + tolerance) times its running minimum.
ReportRecord gaussian_contract_demo(const NormSpec& norm, const GaussianContractParams& prm);

/// Inner-product detector. Quadratic norms pass with magnitude < 1e-8, others with > 1e-3.
ReportRecord triangle_search_report(const NormSpec& norm2d, int angular_grid, bool refine);

/// Passes when the error ladder decreases and the last row is within 5%.
ReportRecord step0_report(double p, const std::vector<double>& R_list, double eps_norm);

/// Lifted tent at each R under regularized l_p in 3D; passes when every Theta is positive, the
/// masses are 1 within 1e-8 and the boundary share decreases.
ReportRecord lift_report(double p, double eps_norm, const std::vector<double>& R_list);

/// Runs the experiment named in a config {experiment, norm, params, seed, out} and writes
/// report.json, trace.csv and plot.svg into `out` (or `out_override` when non-empty).
ReportRecord run_config(const std::string& path, const std::string& out_override = "");

/// Writes report.json, and trace.csv plus plot.svg when the report has a table.
void write_artifacts(const ReportRecord& report, const std::string& out_dir);

/// 0 pass, 1 fail.
inline int exit_code(const ReportRecord& r) { return r.pass ? 0 : 1; }

}  // namespace minkflow
