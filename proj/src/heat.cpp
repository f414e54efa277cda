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


#include "minkflow/heat.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace minkflow {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Faces between node i and its upper neighbour along `axis`, in flat order.
struct FaceSet {
  int axis;
  std::vector<long> lower;
};

std::vector<FaceSet> faces_of(const Grid& g) {
  std::vector<FaceSet> out;
  for (int a = 0; a < g.dim; ++a) {
    FaceSet f{a, {}};
    for (long i = 0; i < g.size(); ++i) {
      if (g.multi_index(i)[a] + 1 < g.m[a]) f.lower.push_back(i);
    }
    out.push_back(std::move(f));
  }
  return out;
}

// Mirror-ghost neighbours along `axis`.
long up_of(const Grid& g, long i, int axis) {
  return g.multi_index(i)[axis] + 1 < g.m[axis] ? i + g.stride(axis) : i;
}
long down_of(const Grid& g, long i, int axis) {
  return g.multi_index(i)[axis] > 0 ? i - g.stride(axis) : i;
}

Vec face_gradient(const Grid& g, const std::vector<double>& u, long i, int axis) {
  const long j = i + g.stride(axis);
  Vec d(g.dim);
  for (int b = 0; b < g.dim; ++b) {
    if (b == axis) {
      d(b) = (u[j] - u[i]) / g.h(b);
    } else {
      double ci = u[up_of(g, i, b)] - u[down_of(g, i, b)];
      double cj = u[up_of(g, j, b)] - u[down_of(g, j, b)];
      d(b) = (ci + cj) / (4.0 * g.h(b));
    }
  }
  return d;
}

// Clips undershoots and restores the mass multiplicatively; aborts on real negativity.
void clip_negatives(std::vector<double>& u, DensityTrajectory& traj, double cellvol) {
  double top = 0.0, low = 0.0;
  for (double v : u) {
    top = std::max(top, v);
    low = std::min(low, v);
  }
  if (!std::isfinite(top) || !std::isfinite(low)) throw Error(ErrorKind::NegativeDensity, "non-finite density");
  if (low >= 0.0) return;
  traj.min_pre_clip = std::min(traj.min_pre_clip, low / top);
  if (low < -1e-12 * top) {
    throw Error(ErrorKind::NegativeDensity, "density reached " + num(low) + " against max " + num(top));
  }
  double before = 0.0, after = 0.0;
  for (double& v : u) {
    before += v;
    if (v < 0.0) {
      traj.clipped_mass += -v * cellvol;
      v = 0.0;
    }
    after += v;
  }
  const double k = before / after;
  for (double& v : u) v *= k;
}

void explicit_step(const NormSpec& norm, const Grid& g, const std::vector<FaceSet>& faces, std::vector<Vec>& hints,
                   std::vector<double>& flux, std::vector<double>& out, std::vector<double>& u, double dt) {
  size_t f = 0;
  for (const auto& fs : faces) {
    for (long i : fs.lower) {
      Vec d = face_gradient(g, u, i, fs.axis);
      Vec v = d.isZero(0.0) ? Vec(Vec::Zero(g.dim)) : norm.legendre_inverse(-d, hints[f]);
      if (!v.isZero(0.0)) hints[f] = v;
      flux[f++] = v(fs.axis);
    }
  }
  // Outflow limiter: a cell never gives away more than it holds.
  std::fill(out.begin(), out.end(), 0.0);
  f = 0;
  for (const auto& fs : faces) {
    const double k = dt / g.h(fs.axis);
    const long s = g.stride(fs.axis);
    for (long i : fs.lower) {
      double q = flux[f++] * k;
      if (q > 0.0) out[i] += q;
      else out[i + s] -= q;
    }
  }
  f = 0;
  for (const auto& fs : faces) {
    const double k = dt / g.h(fs.axis);
    const long s = g.stride(fs.axis);
    for (long i : fs.lower) {
      double q = flux[f++] * k;
      long donor = q > 0.0 ? i : i + s;
      if (out[donor] > u[donor]) q *= u[donor] / out[donor];
      u[i] -= q;
      u[i + s] += q;
    }
  }
}

void implicit_step(const NormSpec& norm, const Grid& g, const std::vector<FaceSet>& faces, std::vector<Vec>& hints,
                   std::vector<double>& u, double dt, long& substitutions) {
  const long N = g.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(N) * (1 + 6 * g.dim * g.dim));
  for (long i = 0; i < N; ++i) trip.emplace_back(i, i, 1.0);
  Vec e1 = Vec::Zero(g.dim);
  e1(0) = 1.0;
  const Mat g_e1 = norm.hessian(e1);
  size_t f = 0;
  for (const auto& fs : faces) {
    const int a = fs.axis;
    const double k = dt / g.h(a);
    for (long i : fs.lower) {
      const long j = i + g.stride(a);
      Vec d = face_gradient(g, u, i, a);
      Mat M;
      if (d.isZero(0.0)) {
        M = g_e1.inverse();
        ++substitutions;
      } else {
        Vec v = norm.legendre_inverse(-d, hints[f]);
        hints[f] = v;
        M = norm.hessian(v).inverse();
      }
      ++f;
      // Flux across the face: F = -sum_b M(a, b) D_b u, as a stencil on u.
      // u_i loses k F and u_j gains it; rows hold u_new + k div F(u_new).
      auto add = [&](long col, double w) {
        trip.emplace_back(i, col, k * w);
        trip.emplace_back(j, col, -k * w);
      };
      for (int b = 0; b < g.dim; ++b) {
        double c = -M(a, b);
        if (c == 0.0) continue;
        if (b == a) {
          add(j, c / g.h(b));
          add(i, -c / g.h(b));
        } else {
          double w = c / (4.0 * g.h(b));
          add(up_of(g, i, b), w);
          add(down_of(g, i, b), -w);
          add(up_of(g, j, b), w);
          add(down_of(g, j, b), -w);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::LinearSolveFailure, "factorization failed");
  Eigen::Map<Eigen::VectorXd> rhs(u.data(), N);
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error(ErrorKind::LinearSolveFailure, "sparse solve failed");
  }
  for (long i = 0; i < N; ++i) u[i] = x(i);
}

}  // namespace

double explicit_dt_limit(const NormSpec& norm, const Grid& grid) {
  double h2 = grid.h(0) * grid.h(0);
  for (int a = 1; a < grid.dim; ++a) h2 = std::min(h2, grid.h(a) * grid.h(a));
  return h2 * norm.cached_bounds().lambda_lo / (2.0 * grid.dim);
}

FrameDiagnostics frame_diagnostics(const NormSpec& norm, const GridDensity& u, double t) {
  FrameDiagnostics d;
  d.t = t;
  d.mass = u.mass();
  d.entropy = relative_entropy(u);
  SecondMoments m = second_moments(norm, u);
  d.m2_fwd = m.forward;
  d.m2_bwd = m.backward;
  VectorField w = entropy_w_gradient(u, norm);
  double fn = field_norm(norm, u, w);
  d.dissipation = fn * fn;
  d.boundary_mass = u.boundary_mass();
  return d;
}

DensityTrajectory heat_solve(const NormSpec& norm, const GridDensity& u0, const HeatConfig& cfg) {
  const Grid& g = u0.grid;
  if (!cfg.grid.same_as(g)) throw Error(ErrorKind::DimensionMismatch, "initial density lives on another grid");
  if (norm.dim() != g.dim) throw Error(ErrorKind::DimensionMismatch, "norm and grid dimensions differ");
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt and t_end must be > 0");
  if (cfg.snapshot_stride < 1) throw Error(ErrorKind::InvalidArgument, "snapshot_stride must be >= 1");
  if (u0.boundary_mass() >= 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "initial boundary mass " + num(u0.boundary_mass()) + " is not negligible");
  }
  for (double v : u0.values) {
    if (!(v >= 0.0)) throw Error(ErrorKind::NegativeDensity, "initial density has negative or NaN values");
  }
  const long steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  const double dt = cfg.t_end / steps;
  if (cfg.scheme == HeatScheme::ExplicitFlux) {
    double lim = explicit_dt_limit(norm, g);
    if (dt > lim * (1.0 + 1e-12)) {
      throw Error(ErrorKind::StabilityViolation, "dt " + num(dt) + " exceeds the explicit limit " + num(lim));
    }
  }

  DensityTrajectory traj;
  traj.steps = steps;
  traj.dt = dt;
  const double cellvol = g.cell_volume();
  auto snapshot = [&](const std::vector<double>& u, double t) {
    GridDensity d{g, u};
    traj.times.push_back(t);
    traj.diagnostics.push_back(frame_diagnostics(norm, d, t));
    traj.frames.push_back(std::move(d));
  };

  std::vector<double> u = u0.values;
  auto faces = faces_of(g);
  size_t nf = 0;
  for (const auto& fs : faces) nf += fs.lower.size();
  std::vector<Vec> hints(nf, Vec::Zero(g.dim));
  std::vector<double> flux(nf), out(u.size());
  snapshot(u, 0.0);
  double mass = 0.0;
  for (double v : u) mass += v;
  for (long n = 1; n <= steps; ++n) {
    if (cfg.scheme == HeatScheme::ExplicitFlux) {
      explicit_step(norm, g, faces, hints, flux, out, u, dt);
    } else {
      implicit_step(norm, g, faces, hints, u, dt, traj.critical_substitutions);
    }
    clip_negatives(u, traj, cellvol);
    double m = 0.0;
    for (double v : u) m += v;
    traj.max_step_drift = std::max(traj.max_step_drift, std::abs(m - mass) * cellvol);
    mass = m;
    if (n % cfg.snapshot_stride == 0 || n == steps) snapshot(u, n * dt);
  }
  return traj;
}

GridDensity gaussian_profile(const NormSpec& norm, const Vec& z, double a, const Grid& grid) {
  if (!is_symmetric(norm)) throw Error(ErrorKind::AsymmetricNorm, "gaussian profile needs a symmetric norm");
  if (norm.dim() != grid.dim || z.size() != grid.dim) {
    throw Error(ErrorKind::DimensionMismatch, "norm, centre and grid dimensions differ");
  }
  return make_density(grid, gaussian_like_profile(norm, z, a));
}

int frame_index(const DensityTrajectory& traj, double t) {
  const double scale = traj.times.empty() ? 1.0 : std::max(1.0, std::abs(traj.times.back()));
  for (size_t k = 0; k < traj.times.size(); ++k) {
    if (std::abs(traj.times[k] - t) <= 1e-9 * scale) return static_cast<int>(k);
  }
  throw Error(ErrorKind::InvalidArgument, "no frame at t = " + num(t));
}

double entropy_dissipation_residual(const DensityTrajectory& traj, double tau, double T) {
  if (!(T > tau)) throw Error(ErrorKind::InvalidArgument, "window needs tau < T");
  const int k0 = frame_index(traj, tau), k1 = frame_index(traj, T);
  const double drop = traj.diagnostics[k0].entropy - traj.diagnostics[k1].entropy;
  if (std::abs(drop) < 1e-10) throw Error(ErrorKind::DegenerateWindow, "entropy barely changes on the window");
  double integral = 0.0;
  for (int k = k0; k < k1; ++k) {
    integral += 0.5 * (traj.times[k + 1] - traj.times[k]) *
                (traj.diagnostics[k].dissipation + traj.diagnostics[k + 1].dissipation);
  }
  return std::abs(integral - drop) / std::abs(drop);
}

FirstVariation first_variation_residual(const NormSpec& norm, const DensityTrajectory& a,
                                        const DensityTrajectory& b, double t, double dt_fd) {
  if (!(dt_fd > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt_fd must be > 0");
  const int am = frame_index(a, t - dt_fd), a0 = frame_index(a, t), ap = frame_index(a, t + dt_fd);
  const int bm = frame_index(b, t - dt_fd), b0 = frame_index(b, t), bp = frame_index(b, t + dt_fd);
  FirstVariation out;
  auto fits = [&](const GridDensity& d) {
    long s = 0;
    for (double v : d.values) s += v > 0.0;
    return s <= kMaxExactSupport;
  };
  auto reduce = [&](const GridDensity& d) {
    return out.coarsen_factor == 1 ? d : coarsen(d, out.coarsen_factor);
  };
  auto all_fit = [&] {
    for (const auto* d : {&a.frames[am], &a.frames[a0], &a.frames[ap], &b.frames[bm], &b.frames[b0], &b.frames[bp]}) {
      if (!fits(reduce(*d))) return false;
    }
    return true;
  };
  while (!all_fit()) {
    out.coarsen_factor *= 2;
    for (int ax = 0; ax < a.frames[a0].grid.dim; ++ax) {
      if (a.frames[a0].grid.m[ax] % out.coarsen_factor != 0 || b.frames[b0].grid.m[ax] % out.coarsen_factor != 0) {
        throw Error(ErrorKind::SupportTooLarge, "frames cannot be coarsened to fit the exact solver");
      }
    }
  }
  auto w2sq = [&](int i, int j) { return w2_exact(norm, reduce(a.frames[i]), reduce(b.frames[j])).cost; };
  out.finite_difference = (w2sq(ap, bp) - w2sq(am, bm)) / (4.0 * dt_fd);
  GridDensity mu = reduce(a.frames[a0]), nu = reduce(b.frames[b0]);
  TransportPlan plan = w2_exact(norm, mu, nu);
  out.formula = plan_omega_gap(norm, mu, nu, plan).gap;
  out.residual = std::abs(out.finite_difference - out.formula);
  return out;
}

}  // namespace minkflow
