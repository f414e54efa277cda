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
#include <vector>

#include "minkflow/entropy.hpp"
#include "minkflow/grid.hpp"

namespace minkflow {

/// Triangle whose edges BC, CA, AB touch the unit sphere at a, b, c.
struct TangentTriangle {
  Vec A, B, C;
  Vec a, b, c;  // unit tangent points
  double area_oab = 0.0, area_obc = 0.0, area_oca = 0.0;

  /// |OAB| c + |OBC| a + |OCA| b; zero for every inner-product norm.
  Vec weighted_vector() const;
  double area() const { return area_oab + area_obc + area_oca; }
};

/// Builds the tangent triangle for directions a, b, c (rescaled to unit norm). Throws
/// InvalidTriple when tangents are parallel or the triangle does not enclose the origin.
TangentTriangle make_tangent_triangle(const NormSpec& norm2d, const Vec& a, const Vec& b, const Vec& c);

Vec tangent_triangle_vector(const NormSpec& norm2d, const Vec& a, const Vec& b, const Vec& c);

/// Tent over a tangent triangle: rho(x) = (sigma / s^2) (1 - max_k L(a_k).(x - P) / s)_+,
/// unit mass, apex P, scale s. On the sub-triangle opposite to a_k, grad(-rho) = sigma a_k / s^3.
struct TentDensity {
  TangentTriangle tri;
  std::array<Vec, 3> covectors;  // L(a), L(b), L(c)
  double sigma = 0.0;            // peak value at scale 1 (3 / area)
  Vec apex;
  double scale = 1.0;

  double value(const Vec& x) const;
  Profile profile() const;
  /// Vertices of the support, in the order A, B, C.
  std::array<Vec, 3> support() const;
  /// Sub-triangles (apex, V1, V2) with the constant grad(-rho) and -D rho on each.
  struct Piece {
    Vec v0, v1, v2;
    Vec grad;
    Vec cov;
  };
  std::array<Piece, 3> pieces() const;
};

/// (-1, 0), (2^-1/p, 2^-1/p), (2^-1/p, -2^-1/p): unit vectors of the exact l_p norm.
std::array<Vec, 3> step0_directions(double p);

/// Unit-mass tent over the tangent triangle of `dirs` under `norm2d`.
TentDensity make_tent(const NormSpec& norm2d, const std::array<Vec, 3>& dirs, const Vec& apex, double scale = 1.0);

/// Exact l_p tent (eps = 0): A = (2^(1-1/p), 0), B = (-1, -1-2^(1-1/p)), C = (-1, 1+2^(1-1/p)).
TentDensity triangle_density(double p, double R);

/// Rho_eps(x) = eps^-n rho(x / eps).
TentDensity scale_density(const TentDensity& rho, double eps);
/// Scaled grid density on matched nodes: grid bounds times eps, values times eps^-n.
GridDensity scale_density(const GridDensity& rho, double eps);
/// Samples the scaled tent on `grid`; SupportOverflow if the scaled support leaves the grid.
GridDensity scale_density_onto(const TentDensity& rho, double eps, const Grid& grid);

struct ThetaOptions {
  int order = 24;   // Gauss points per direction on each sub-triangle
  int levels = 8;   // fans per sub-triangle
};

/// Theta with grad(-rho) exact per sub-triangle and product Gauss quadrature of L(-x).
ThetaValue theta(const NormSpec& norm2d, const TentDensity& rho, const ThetaOptions& opts = {});

/// (1 + 2^(1-1/p)) (2^(1-2/p) - 1) sigma for the exact l_p tent.
double step0_closed_form(double p);

struct Step0Row {
  double R = 0.0;
  double value = 0.0;  // numerator(R) / R
  double rel_error = 0.0;
};

struct Step0Table {
  double p = 0.0;
  double eps_norm = 0.0;
  double limit = 0.0;
  std::vector<Step0Row> rows;
  bool monotone = false;  // |value - limit| strictly decreasing along the rows
};

Step0Table step0_limit(double p, const std::vector<double>& R_list, double eps_norm);

enum class DetectorVerdict { NonInnerProduct, InnerProduct, Inconclusive };

struct TriangleSearchResult {
  TangentTriangle best;
  double magnitude = 0.0;
  long triples = 0;
  DetectorVerdict verdict = DetectorVerdict::Inconclusive;
};

inline constexpr double kTriangleAreaCap = 64.0;

/// Sweeps triples of tangent directions on an angular grid for the largest weighted vector,
/// optionally refining the best triple by Nelder-Mead. Triangles above kTriangleAreaCap are skipped.
TriangleSearchResult triangle_search(const NormSpec& norm2d, int angular_grid, bool refine);

/// Smooth cut-off: 1 on |y| <= sqrt(R), smootherstep down to 0 at sqrt(R) + 1.
struct CutOff {
  double R = 0.0;
  double value(double y) const;
  double derivative(double y) const;
  double integral() const;  // 2 sqrt(R) + 1
  /// |ann| / int eta with |ann| the transition length 2.
  double boundary_share() const;
};

/// rho(x, y) = rho_R(x) eta_R(y) / int eta_R on R^3.
struct LiftedDensity {
  TentDensity base;
  CutOff cut;

  double value(const Vec& z) const;
  double mass(int order = 24) const;
};

LiftedDensity lift_density(const TentDensity& rho2d, double R);

/// Theta of the lift under a 3D norm, by tent pieces times Gauss rules in y.
ThetaValue theta(const NormSpec& norm3d, const LiftedDensity& rho, const ThetaOptions& opts = {});

}  // namespace minkflow
