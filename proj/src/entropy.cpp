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


#include "minkflow/entropy.hpp"

#include <cmath>

namespace minkflow {

double relative_entropy(const GridDensity& mu) {
  double s = 0.0;
  for (double v : mu.values) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s * mu.grid.cell_volume();
}

VectorField entropy_w_gradient(const GridDensity& mu, const NormSpec& norm, double threshold) {
  const Grid& g = mu.grid;
  if (g.dim != norm.dim()) throw Error(ErrorKind::DimensionMismatch, "density dimension differs from norm");
  VectorField f{g, std::vector<Vec>(g.size(), Vec::Zero(g.dim)), std::vector<std::uint8_t>(g.size(), 0)};
  for (long i = 0; i < g.size(); ++i) {
    const double r = mu.values[i];
    if (!(r >= threshold)) {
      f.flagged[i] = 1;
      continue;
    }
    f.v[i] = norm.legendre_inverse(Vec(-central_gradient(mu, i))) / r;
  }
  return f;
}

double flagged_mass(const GridDensity& mu, const VectorField& field) {
  double s = 0.0;
  for (size_t i = 0; i < field.flagged.size(); ++i) {
    if (field.flagged[i]) s += mu.values[i];
  }
  return s * mu.grid.cell_volume();
}

SecondMoments second_moments(const NormSpec& norm, const GridDensity& mu) {
  if (mu.grid.dim != norm.dim()) throw Error(ErrorKind::DimensionMismatch, "density dimension differs from norm");
  SecondMoments m;
  for (long i = 0; i < mu.grid.size(); ++i) {
    if (mu.values[i] == 0.0) continue;
    Vec x = mu.grid.node(i);
    double f = norm.value(x), b = norm.value(-x);
    m.forward += f * f * mu.values[i];
    m.backward += b * b * mu.values[i];
  }
  m.forward *= mu.grid.cell_volume();
  m.backward *= mu.grid.cell_volume();
  return m;
}

std::pair<GridDensity, VectorField> contraction_geodesic(const GridDensity& mu, double T, double s) {
  if (!(T > 1.0) || !(s >= 0.0) || !(s < T)) {
    throw Error(ErrorKind::DegenerateScale, "contraction geodesic needs T > 1 and 0 <= s < T");
  }
  const double lam = 1.0 - s / T;
  Grid g = mu.grid;
  for (int a = 0; a < g.dim; ++a) {
    g.lo[a] *= lam;
    g.hi[a] *= lam;
  }
  const double jac = std::pow(1.0 / lam, g.dim);
  GridDensity rho{g, mu.values};
  for (double& v : rho.values) v *= jac;
  VectorField f{g, std::vector<Vec>(g.size()), std::vector<std::uint8_t>(g.size(), 0)};
  for (long i = 0; i < g.size(); ++i) f.v[i] = -g.node(i) / (T - s);
  return {rho, f};
}

namespace {

/// int g_w(w, grad) drho = sum rho L(w) . grad * cellvol.
double pairing(const NormSpec& norm, const GridDensity& rho, const VectorField& w, const VectorField& grad) {
  if (!w.grid.same_as(rho.grid) || !grad.grid.same_as(rho.grid)) {
    throw Error(ErrorKind::DimensionMismatch, "fields must live on the density grid");
  }
  double s = 0.0;
  for (long i = 0; i < rho.grid.size(); ++i) {
    if (rho.values[i] == 0.0 || grad.flagged[i]) continue;
    s += rho.values[i] * norm.legendre(w.v[i]).dot(grad.v[i]);
  }
  return s * rho.grid.cell_volume();
}

}  // namespace

double omega_gap(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu, const VectorField& grad_mu,
                 const VectorField& grad_nu, const VectorField& w0, const VectorField& w1) {
  return pairing(norm, nu, w1, grad_nu) - pairing(norm, mu, w0, grad_mu);
}

OmegaGap contraction_omega_gap(const NormSpec& norm, const GridDensity& mu, double T) {
  auto [rho0, w0] = contraction_geodesic(mu, T, 0.0);
  auto [rho1, w1] = contraction_geodesic(mu, T, 1.0);
  OmegaGap r;
  r.gap = omega_gap(norm, rho0, rho1, entropy_w_gradient(rho0, norm), entropy_w_gradient(rho1, norm), w0, w1);
  r.w2_sq = second_moments(norm, mu).backward / (T * T);
  r.quotient = r.w2_sq > 0.0 ? r.gap / -r.w2_sq : 0.0;
  return r;
}

OmegaGap plan_omega_gap(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu,
                        const TransportPlan& plan) {
  const Grid& gm = mu.grid;
  const Grid& gn = nu.grid;
  std::vector<Vec> fwd(gm.size(), Vec::Zero(gm.dim)), bwd(gn.size(), Vec::Zero(gn.dim));
  std::vector<double> rm(gm.size(), 0.0), rn(gn.size(), 0.0);
  for (const auto& e : plan.entries) {
    fwd[e.source] += e.mass * gn.node(e.target);
    rm[e.source] += e.mass;
    bwd[e.target] += e.mass * gm.node(e.source);
    rn[e.target] += e.mass;
  }
  VectorField w0{gm, std::vector<Vec>(gm.size(), Vec::Zero(gm.dim)), std::vector<std::uint8_t>(gm.size(), 0)};
  VectorField w1{gn, std::vector<Vec>(gn.size(), Vec::Zero(gn.dim)), std::vector<std::uint8_t>(gn.size(), 0)};
  for (long i = 0; i < gm.size(); ++i) {
    if (rm[i] > 0.0) w0.v[i] = fwd[i] / rm[i] - gm.node(i);
  }
  for (long j = 0; j < gn.size(); ++j) {
    if (rn[j] > 0.0) w1.v[j] = gn.node(j) - bwd[j] / rn[j];
  }
  OmegaGap r;
  r.gap = omega_gap(norm, mu, nu, entropy_w_gradient(mu, norm), entropy_w_gradient(nu, norm), w0, w1);
  r.w2_sq = plan.cost;
  r.quotient = r.w2_sq > 0.0 ? r.gap / -r.w2_sq : 0.0;
  r.approximate = true;
  return r;
}

ThetaValue theta(const NormSpec& norm, const GridDensity& rho) {
  const Grid& g = rho.grid;
  if (g.dim != norm.dim()) throw Error(ErrorKind::DimensionMismatch, "density dimension differs from norm");
  ThetaValue t;
  for (long i = 0; i < g.size(); ++i) {
    Vec x = g.node(i);
    Vec d = central_gradient(rho, i);
    if (d.squaredNorm() > 0.0 && x.squaredNorm() > 0.0) {
      t.numerator += norm.legendre(Vec(-x)).dot(norm.legendre_inverse(Vec(-d)));
    }
    if (rho.values[i] > 0.0) {
      double b = norm.value(-x);
      t.second_moment += b * b * rho.values[i];
    }
  }
  t.numerator *= g.cell_volume();
  t.second_moment *= g.cell_volume();
  if (!(t.second_moment > 0.0)) throw Error(ErrorKind::ZeroSecondMoment, "second moment vanishes");
  t.theta = t.numerator / t.second_moment;
  return t;
}

double metric_speed(const NormSpec& norm, const std::vector<GridDensity>& frames, const std::vector<double>& times,
                    int index, SpeedMethod method) {
  if (frames.size() != times.size() || index < 0 || index + 1 >= static_cast<int>(frames.size())) {
    throw Error(ErrorKind::InvalidArgument, "metric_speed needs an index with a successor frame");
  }
  const double dt = times[index + 1] - times[index];
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "frame times must increase");
  const GridDensity& a = frames[index];
  const GridDensity& b = frames[index + 1];
  TransportPlan p = method == SpeedMethod::Exact ? w2_exact(norm, a, b) : w2_sinkhorn(norm, a, b);
  return p.w2() / dt;
}

double field_norm(const NormSpec& norm, const GridDensity& mu, const VectorField& field) {
  double s = 0.0;
  for (long i = 0; i < mu.grid.size(); ++i) {
    if (mu.values[i] == 0.0 || field.flagged[i]) continue;
    double v = norm.value(field.v[i]);
    s += v * v * mu.values[i];
  }
  return std::sqrt(s * mu.grid.cell_volume());
}

}  // namespace minkflow
