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

#include <vector>

#include "minkflow/entropy.hpp"
#include "minkflow/grid.hpp"

namespace minkflow {

enum class HeatScheme { ExplicitFlux, SemiImplicitFrozen };

struct HeatConfig {
  Grid grid;
  double dt = 0.0;
  double t_end = 0.0;
  HeatScheme scheme = HeatScheme::ExplicitFlux;
  int snapshot_stride = 1;  // steps between stored frames
};

struct FrameDiagnostics {
  double t = 0.0;
  double mass = 0.0;
  double entropy = 0.0;
  double m2_fwd = 0.0;
  double m2_bwd = 0.0;
  double dissipation = 0.0;  // int ||grad(-rho)||^2 / rho^2 dmu
  double boundary_mass = 0.0;
};

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<GridDensity> frames;
  std::vector<FrameDiagnostics> diagnostics;
  long steps = 0;
  double dt = 0.0;               // step actually used (t_end / steps)
  double max_step_drift = 0.0;   // largest per-step |mass change|
  double min_pre_clip = 0.0;     // most negative value seen before clipping, relative to max u
  double clipped_mass = 0.0;     // total mass moved by clipping
  long critical_substitutions = 0;  // faces where D u = 0 in the frozen scheme
};

/// Largest stable explicit step: min h^2 * lambda_lo / (2 n), lambda_lo the cached lower
/// eigenvalue bound of g (so 1 / lambda_lo bounds the diffusion coefficients g^-1).
double explicit_dt_limit(const NormSpec& norm, const Grid& grid);

/// Evolves d_t u = -div(L*(-D u)) with zero-flux boundaries. Face fluxes use the compact
/// difference across the face and averaged central differences along it.
DensityTrajectory heat_solve(const NormSpec& norm, const GridDensity& u0, const HeatConfig& cfg);

FrameDiagnostics frame_diagnostics(const NormSpec& norm, const GridDensity& u, double t);

/// Normalized exp(-||x - z||^2 / (4a)) for a symmetric norm. At parameter a + t this is the
/// exact heat flow of the profile at a.
GridDensity gaussian_profile(const NormSpec& norm, const Vec& z, double a, const Grid& grid);

/// |int_tau^T dissipation dt - (Ent(tau) - Ent(T))| / |Ent(tau) - Ent(T)|, trapezoidal in time
/// over the stored frames. tau and T must be frame times.
double entropy_dissipation_residual(const DensityTrajectory& traj, double tau, double T);

struct FirstVariation {
  double finite_difference = 0.0;  // centred d/dt W2^2/2
  double formula = 0.0;            // int g(w1, nu') dnu - int g(w0, mu') dmu
  double residual = 0.0;           // |finite_difference - formula|
  int coarsen_factor = 1;          // applied so exact plans fit
  bool approximate = true;         // geodesic from barycentric projection
};

/// First-variation check at frame time t using frames t - dt_fd and t + dt_fd of both runs.
FirstVariation first_variation_residual(const NormSpec& norm, const DensityTrajectory& a,
                                        const DensityTrajectory& b, double t, double dt_fd);

/// Index of the frame at time t (within 1e-9 relative); InvalidArgument when absent.
int frame_index(const DensityTrajectory& traj, double t);

}  // namespace minkflow
