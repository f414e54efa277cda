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

#include "json.hpp"
#include "minkflow/flows.hpp"
#include "minkflow/grid.hpp"
#include "minkflow/heat.hpp"

namespace minkflow {

using Json = nlohmann::ordered_json;

/// Reads a JSON document from a file, or parses the argument itself when it starts with '{'.
/// Missing files and parse errors raise InvalidConfig.
Json load_json(const std::string& path_or_inline);
void save_json(const Json& doc, const std::string& path);

/// {family, dim, params: {matrix, p, eps, shear, center, inner}}; families are quadratic,
/// euclidean, regularized_p, shifted_ball and reversed.
NormSpec norm_from_json(const Json& doc);
Json norm_to_json(const NormSpec& norm);
NormSpec load_norm(const std::string& path_or_inline);

/// {kind, scale, z, Q, center}; kinds are squared_reverse_norm, squared_distance, quadratic.
PotentialSpec potential_from_json(const Json& doc, int dim);
PotentialSpec load_potential(const std::string& path_or_inline, int dim);

/// {dim, lo[], hi[], m[]}.
Grid grid_from_json(const Json& doc);
Json grid_to_json(const Grid& grid);

/// Density file: JSON grid header at `path` with a "values" entry naming the CSV (same stem,
/// .csv) that holds row-major values under the header `rho`.
void write_density(const GridDensity& rho, const std::string& path);
GridDensity read_density(const std::string& path);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
/// Columns t, mass, entropy, m2_fwd, m2_bwd, dissipation.
void write_series_csv(const DensityTrajectory& traj, const std::string& path);

struct Series {
  std::string name;
  std::vector<double> y;
};

/// Plain SVG line chart with axes, tick labels and a legend.
std::string svg_line_chart(const std::vector<double>& x, const std::vector<Series>& series, const std::string& xlabel,
                           const std::string& ylabel);

/// Vec / Mat helpers for JSON lists (matrices row-major).
Vec vec_from_json(const Json& doc, const std::string& what);
Mat mat_from_json(const Json& doc, int n, const std::string& what);
Json vec_to_json(const Vec& v);

}  // namespace minkflow
