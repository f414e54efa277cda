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

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "minkflow/norms.hpp"

namespace minkflow {

/// Cell-centred rectangular grid, row-major with axis 0 slowest.
struct Grid {
  int dim = 0;
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  std::array<int, 3> m{1, 1, 1};

  static Grid make(const std::vector<double>& lo, const std::vector<double>& hi, const std::vector<int>& m);
  /// Square/cubic box [-half, half]^dim with `cells` per axis.
  static Grid box(int dim, double half, int cells);

  double h(int axis) const { return (hi[axis] - lo[axis]) / m[axis]; }
  double cell_volume() const;
  long size() const;
  long stride(int axis) const;
  Vec node(long index) const;
  std::array<int, 3> multi_index(long index) const;
  long flat_index(const std::array<int, 3>& idx) const;
  /// True when the node sits in the outermost layer of cells.
  bool on_boundary(long index) const;
  bool same_as(const Grid& other) const;
};

/// Nonnegative density sampled at cell centres.
struct GridDensity {
  Grid grid;
  std::vector<double> values;

  double mass() const;
  double boundary_mass() const;
  double max_value() const;
};

struct VectorField {
  Grid grid;
  std::vector<Vec> v;
  std::vector<std::uint8_t> flagged;  // nodes excluded by the positivity threshold
};

using Profile = std::function<double(const Vec&)>;

/// Samples `profile` at nodes, clips negatives, renormalizes to unit mass.
GridDensity make_density(const Grid& grid, const Profile& profile);
/// Same from an explicit row-major table.
GridDensity make_density(const Grid& grid, const std::vector<double>& table);

Profile gaussian_like_profile(const NormSpec& norm, const Vec& center, double a);
Profile uniform_profile(const Vec& box_lo, const Vec& box_hi);

/// Second-order central difference D_h rho at a node, mirror ghosts at the boundary.
Vec central_gradient(const GridDensity& rho, long index);

/// Bilinear / trilinear interpolation; zero outside the node hull.
double interpolate(const GridDensity& rho, const Vec& x);

/// Relative L1 distance sum |a - b| / sum |b| on identical grids.
double relative_l1(const GridDensity& a, const GridDensity& b);

/// Sums blocks of factor^dim cells into a coarser grid (mass preserving).
GridDensity coarsen(const GridDensity& rho, int factor);

/// Convolution of a profile with the normalized bump exp(-1/(1-|y/r|^2)) of radius r,
/// by a fixed tensor Gauss rule; the result is again an evaluable profile.
Profile mollified_profile(const Profile& profile, int dim, double radius, int order = 8);

}  // namespace minkflow
