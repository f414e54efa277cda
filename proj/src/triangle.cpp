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


#include "minkflow/triangle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "minkflow/optimize.hpp"
#include "minkflow/quadrature.hpp"

namespace minkflow {

namespace {

double cross(const Vec& u, const Vec& v) { return u(0) * v(1) - u(1) * v(0); }

void check_planar(const NormSpec& norm) {
  if (norm.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "tangent triangles need a 2D norm");
}

/// Point y with l1 . y = 1 and l2 . y = 1; false when the lines are (nearly) parallel.
bool meet(const Vec& l1, const Vec& l2, Vec& y) {
  const double det = cross(l1, l2);
  if (std::abs(det) <= 1e-12 * l1.norm() * l2.norm()) return false;
  y = Vec(2);
  y(0) = (l2(1) - l1(1)) / det;
  y(1) = (l1(0) - l2(0)) / det;
  return true;
}

/// Triangle from unit tangent points and their covectors; false when invalid.
bool build_triangle(const Vec& a, const Vec& b, const Vec& c, const Vec& la, const Vec& lb, const Vec& lc,
                    TangentTriangle& t) {
  if (!meet(lb, lc, t.A) || !meet(lc, la, t.B) || !meet(la, lb, t.C)) return false;
  const double s1 = 0.5 * cross(t.A, t.B), s2 = 0.5 * cross(t.B, t.C), s3 = 0.5 * cross(t.C, t.A);
  const double scale = std::abs(s1) + std::abs(s2) + std::abs(s3);
  const double tol = 1e-12 * scale;
  const bool pos = s1 > tol && s2 > tol && s3 > tol;
  const bool neg = s1 < -tol && s2 < -tol && s3 < -tol;
  if (!pos && !neg) return false;
  t.a = a;
  t.b = b;
  t.c = c;
  t.area_oab = std::abs(s1);
  t.area_obc = std::abs(s2);
  t.area_oca = std::abs(s3);
  return true;
}

Vec unit(const NormSpec& norm, const Vec& d) {
  const double n = norm.value(d);
  if (!(n > 0.0)) throw Error(ErrorKind::ZeroVector, "tangent direction must be nonzero");
  return d / n;
}

}  // namespace

Vec TangentTriangle::weighted_vector() const { return area_oab * c + area_obc * a + area_oca * b; }

TangentTriangle make_tangent_triangle(const NormSpec& norm2d, const Vec& a, const Vec& b, const Vec& c) {
  check_planar(norm2d);
  Vec ua = unit(norm2d, a), ub = unit(norm2d, b), uc = unit(norm2d, c);
  TangentTriangle t;
  if (!build_triangle(ua, ub, uc, norm2d.legendre(ua), norm2d.legendre(ub), norm2d.legendre(uc), t)) {
    throw Error(ErrorKind::InvalidTriple, "tangent lines are parallel or do not enclose the origin");
  }
  return t;
}

Vec tangent_triangle_vector(const NormSpec& norm2d, const Vec& a, const Vec& b, const Vec& c) {
  return make_tangent_triangle(norm2d, a, b, c).weighted_vector();
}

double TentDensity::value(const Vec& x) const {
  const Vec y = (x - apex) / scale;
  double m = -std::numeric_limits<double>::infinity();
  for (const Vec& l : covectors) m = std::max(m, l.dot(y));
  return m < 1.0 ? sigma / (scale * scale) * (1.0 - m) : 0.0;
}

Profile TentDensity::profile() const {
  return [t = *this](const Vec& x) { return t.value(x); };
}

std::array<Vec, 3> TentDensity::support() const {
  return {Vec(apex + scale * tri.A), Vec(apex + scale * tri.B), Vec(apex + scale * tri.C)};
}

std::array<TentDensity::Piece, 3> TentDensity::pieces() const {
  auto [A, B, C] = support();
  const double g = sigma / (scale * scale * scale);
  return {Piece{apex, B, C, Vec(g * tri.a), Vec(g * covectors[0])},
          Piece{apex, C, A, Vec(g * tri.b), Vec(g * covectors[1])},
          Piece{apex, A, B, Vec(g * tri.c), Vec(g * covectors[2])}};
}

std::array<Vec, 3> step0_directions(double p) {
  const double q = std::pow(2.0, -1.0 / p);
  return {make_vec({-1.0, 0.0}), make_vec({q, q}), make_vec({q, -q})};
}

TentDensity make_tent(const NormSpec& norm2d, const std::array<Vec, 3>& dirs, const Vec& apex, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "tent scale must be > 0");
  if (apex.size() != 2) throw Error(ErrorKind::DimensionMismatch, "tent apex must be planar");
  TentDensity t;
  t.tri = make_tangent_triangle(norm2d, dirs[0], dirs[1], dirs[2]);
  t.covectors = {norm2d.legendre(t.tri.a), norm2d.legendre(t.tri.b), norm2d.legendre(t.tri.c)};
  t.sigma = 3.0 / t.tri.area();
  t.apex = apex;
  t.scale = scale;
  return t;
}

TentDensity triangle_density(double p, double R) {
  if (!(p > 2.0)) throw Error(ErrorKind::InvalidP, "triangle density needs p > 2");
  if (!(R >= 0.0)) throw Error(ErrorKind::InvalidArgument, "shift R must be >= 0");
  return make_tent(NormSpec::regularized_p(p, 0.0, 2), step0_directions(p), make_vec({-R, 0.0}));
}

TentDensity scale_density(const TentDensity& rho, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale must be > 0");
  TentDensity t = rho;
  t.apex = eps * rho.apex;
  t.scale = eps * rho.scale;
  return t;
}

GridDensity scale_density(const GridDensity& rho, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale must be > 0");
  GridDensity out = rho;
  for (int a = 0; a < out.grid.dim; ++a) {
    out.grid.lo[a] *= eps;
    out.grid.hi[a] *= eps;
  }
  const double f = std::pow(eps, -out.grid.dim);
  for (double& v : out.values) v *= f;
  return out;
}

GridDensity scale_density_onto(const TentDensity& rho, double eps, const Grid& grid) {
  if (grid.dim != 2) throw Error(ErrorKind::DimensionMismatch, "tent densities are planar");
  TentDensity t = scale_density(rho, eps);
  for (const Vec& v : t.support()) {
    for (int a = 0; a < 2; ++a) {
      if (v(a) <= grid.lo[a] + grid.h(a) || v(a) >= grid.hi[a] - grid.h(a)) {
        throw Error(ErrorKind::SupportOverflow, "scaled support leaves the grid");
      }
    }
  }
  return make_density(grid, t.profile());
}

ThetaValue theta(const NormSpec& norm2d, const TentDensity& rho, const ThetaOptions& opts) {
  check_planar(norm2d);
  ThetaValue out;
  for (const auto& piece : rho.pieces()) {
    for (const auto& q : triangle_rule(piece.v0, piece.v1, piece.v2, opts.order, opts.levels)) {
      const Vec mx = -q.x;
      if (mx.squaredNorm() > 0.0) out.numerator += q.w * norm2d.legendre(mx).dot(piece.grad);
      const double b = norm2d.value(mx);
      out.second_moment += q.w * b * b * rho.value(q.x);
    }
  }
  if (!(out.second_moment > 0.0)) throw Error(ErrorKind::ZeroSecondMoment, "second moment vanishes");
  out.theta = out.numerator / out.second_moment;
  return out;
}

double step0_closed_form(double p) {
  const double k = std::pow(2.0, 1.0 - 1.0 / p);
  const double sigma = 3.0 / ((1.0 + k) * (1.0 + k));
  return (1.0 + k) * (std::pow(2.0, 1.0 - 2.0 / p) - 1.0) * sigma;
}

Step0Table step0_limit(double p, const std::vector<double>& R_list, double eps_norm) {
  if (!(p >= 2.0)) throw Error(ErrorKind::InvalidP, "step0 needs p >= 2");
  if (!(eps_norm >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eps_norm must be >= 0");
  for (size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] > 0.0) || (i > 0 && !(R_list[i] > R_list[i - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "R values must be positive and increasing");
    }
  }
  NormSpec norm = NormSpec::regularized_p(p, eps_norm, 2);
  Step0Table tab;
  tab.p = p;
  tab.eps_norm = eps_norm;
  tab.limit = step0_closed_form(p);
  tab.monotone = true;
  for (double R : R_list) {
    TentDensity t = make_tent(norm, step0_directions(p), make_vec({-R, 0.0}));
    Step0Row row;
    row.R = R;
    row.value = theta(norm, t).numerator / R;
    row.rel_error = tab.limit != 0.0 ? std::abs(row.value - tab.limit) / std::abs(tab.limit) : std::abs(row.value);
    if (!tab.rows.empty() &&
        !(std::abs(row.value - tab.limit) < std::abs(tab.rows.back().value - tab.limit))) {
      tab.monotone = false;
    }
    tab.rows.push_back(row);
  }
  return tab;
}

TriangleSearchResult triangle_search(const NormSpec& norm2d, int angular_grid, bool refine) {
  check_planar(norm2d);
  if (angular_grid < 12) throw Error(ErrorKind::InvalidArgument, "angular_grid must be >= 12");
  auto direction = [&](double th) { return unit(norm2d, make_vec({std::cos(th), std::sin(th)})); };
  const int N = angular_grid;
  std::vector<Vec> dirs(N), covs(N);
  for (int i = 0; i < N; ++i) {
    dirs[i] = direction(2.0 * std::numbers::pi * i / N);
    covs[i] = norm2d.legendre(dirs[i]);
  }
  TriangleSearchResult res;
  res.magnitude = -1.0;
  std::array<double, 3> best_angles{};
  TangentTriangle t;
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      for (int k = j + 1; k < N; ++k) {
        if (!build_triangle(dirs[i], dirs[j], dirs[k], covs[i], covs[j], covs[k], t)) continue;
        if (t.area() > kTriangleAreaCap) continue;
        ++res.triples;
        const double m = t.weighted_vector().norm();
        if (m > res.magnitude) {
          res.magnitude = m;
          res.best = t;
          best_angles = {2.0 * std::numbers::pi * i / N, 2.0 * std::numbers::pi * j / N,
                         2.0 * std::numbers::pi * k / N};
        }
      }
    }
  }
  if (res.magnitude < 0.0) throw Error(ErrorKind::InvalidTriple, "no admissible tangent triangle on the grid");
  if (refine) {
    auto objective = [&](const Eigen::VectorXd& th) {
      Vec a = direction(th(0)), b = direction(th(1)), c = direction(th(2));
      TangentTriangle tt;
      if (!build_triangle(a, b, c, norm2d.legendre(a), norm2d.legendre(b), norm2d.legendre(c), tt) ||
          tt.area() > kTriangleAreaCap) {
        return 0.0;
      }
      return -tt.weighted_vector().norm();
    };
    Eigen::VectorXd x0(3);
    x0 << best_angles[0], best_angles[1], best_angles[2];
    Eigen::VectorXd x = nelder_mead(objective, x0, std::numbers::pi / N, 600);
    if (-objective(x) > res.magnitude) {
      Vec a = direction(x(0)), b = direction(x(1)), c = direction(x(2));
      build_triangle(a, b, c, norm2d.legendre(a), norm2d.legendre(b), norm2d.legendre(c), res.best);
      res.magnitude = res.best.weighted_vector().norm();
    }
  }
  if (res.magnitude > 1e-3) {
    res.verdict = DetectorVerdict::NonInnerProduct;
  } else if (res.magnitude < 1e-8) {
    res.verdict = DetectorVerdict::InnerProduct;
  }
  return res;
}

namespace {

double smootherstep(double t) { return t * t * t * (t * (6.0 * t - 15.0) + 10.0); }
double smootherstep_slope(double t) { return 30.0 * t * t * (t - 1.0) * (t - 1.0); }

}  // namespace

double CutOff::value(double y) const {
  const double t = std::abs(y) - std::sqrt(R);
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return 1.0 - smootherstep(t);
}

double CutOff::derivative(double y) const {
  const double t = std::abs(y) - std::sqrt(R);
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return -(y > 0.0 ? 1.0 : -1.0) * smootherstep_slope(t);
}

double CutOff::integral() const { return 2.0 * std::sqrt(R) + 1.0; }

double CutOff::boundary_share() const { return 2.0 / integral(); }

double LiftedDensity::value(const Vec& z) const {
  return base.value(z.head(2)) * cut.value(z(2)) / cut.integral();
}

namespace {

struct Interval {
  double lo, hi;
};

/// Plateau and the two transition bands of the cut-off.
std::array<Interval, 3> cut_intervals(const CutOff& c) {
  const double r = std::sqrt(c.R);
  return {Interval{-r - 1.0, -r}, Interval{-r, r}, Interval{r, r + 1.0}};
}

}  // namespace

double LiftedDensity::mass(int order) const {
  GaussRule g = gauss_legendre(order);
  double mx = 0.0;
  for (const auto& piece : base.pieces()) {
    for (const auto& q : triangle_rule(piece.v0, piece.v1, piece.v2, order, 1)) mx += q.w * base.value(q.x);
  }
  double my = 0.0;
  for (const auto& iv : cut_intervals(cut)) {
    for (int k = 0; k < order; ++k) my += (iv.hi - iv.lo) * g.w[k] * cut.value(iv.lo + (iv.hi - iv.lo) * g.x[k]);
  }
  return mx * my / cut.integral();
}

LiftedDensity lift_density(const TentDensity& rho2d, double R) {
  if (!(R >= 4.0)) throw Error(ErrorKind::InvalidArgument, "lift needs R >= 4");
  return LiftedDensity{rho2d, CutOff{R}};
}

ThetaValue theta(const NormSpec& norm3d, const LiftedDensity& rho, const ThetaOptions& opts) {
  if (norm3d.dim() != 3) throw Error(ErrorKind::DimensionMismatch, "lifted densities live in 3D");
  GaussRule g = gauss_legendre(opts.order);
  const double Z = rho.cut.integral();
  ThetaValue out;
  for (const auto& piece : rho.base.pieces()) {
    const Vec& cov2 = piece.cov;
    const auto pts = triangle_rule(piece.v0, piece.v1, piece.v2, opts.order, opts.levels);
    for (const auto& iv : cut_intervals(rho.cut)) {
      const bool plateau = iv.lo < 0.0 && iv.hi > 0.0;
      Vec plateau_grad;
      if (plateau) plateau_grad = norm3d.legendre_inverse(make_vec({cov2(0), cov2(1), 0.0}));
      for (int k = 0; k < opts.order; ++k) {
        const double y = iv.lo + (iv.hi - iv.lo) * g.x[k];
        const double wy = (iv.hi - iv.lo) * g.w[k];
        const double eta = rho.cut.value(y), deta = rho.cut.derivative(y);
        for (const auto& q : pts) {
          const double r2 = rho.base.value(q.x);
          Vec z = make_vec({q.x(0), q.x(1), y});
          Vec grad;
          if (plateau) {
            grad = plateau_grad * (eta / Z);
          } else {
            grad = norm3d.legendre_inverse(make_vec({cov2(0) * eta, cov2(1) * eta, -r2 * deta}) / Z);
          }
          const double w = q.w * wy;
          out.numerator += w * norm3d.legendre(Vec(-z)).dot(grad);
          const double b = norm3d.value(-z);
          out.second_moment += w * b * b * r2 * eta / Z;
        }
      }
    }
  }
  if (!(out.second_moment > 0.0)) throw Error(ErrorKind::ZeroSecondMoment, "second moment vanishes");
  out.theta = out.numerator / out.second_moment;
  return out;
}

}  // namespace minkflow
