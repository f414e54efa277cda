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

#include <utility>
#include <vector>

#include "minkflow/grid.hpp"
#include "minkflow/transport.hpp"

namespace minkflow {

/// Ent(mu) = sum rho log rho * cellvol, with 0 log 0 = 0.
double relative_entropy(const GridDensity& mu);

/// Node field grad(-rho)/rho = L*(-D_h rho)/rho. Nodes with rho below `threshold` get the
/// zero vector and are flagged.
VectorField entropy_w_gradient(const GridDensity& mu, const NormSpec& norm, double threshold = 1e-12);

/// Mass carried by the flagged nodes of a field.
double flagged_mass(const GridDensity& mu, const VectorField& field);

struct SecondMoments {
  double forward = 0.0;   // int ||x||^2 dmu
  double backward = 0.0;  // int ||-x||^2 dmu
};

SecondMoments second_moments(const NormSpec& norm, const GridDensity& mu);

/// Point s of the geodesic from mu to the Dirac mass at the origin, with time parameter T:
/// the pushforward under x -> (1 - s/T) x, stored on the correspondingly shrunk grid so
/// node values match exactly, and its tangent field -x/(T - s).
std::pair<GridDensity, VectorField> contraction_geodesic(const GridDensity& mu, double T, double s);

/// int g_{w1}(w1, grad_nu) dnu - int g_{w0}(w0, grad_mu) dmu for tangent fields w0 on mu
/// and w1 on nu.
double omega_gap(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu, const VectorField& grad_mu,
                 const VectorField& grad_nu, const VectorField& w0, const VectorField& w1);

struct OmegaGap {
  double gap = 0.0;
  double w2_sq = 0.0;     // W2(mu, nu)^2 along the geodesic used
  double quotient = 0.0;  // gap / (-w2_sq)
  bool approximate = false;
};

/// Gap between mu and its contraction at s = 1, with the analytic tangent fields.
OmegaGap contraction_omega_gap(const NormSpec& norm, const GridDensity& mu, double T);

/// Gap along the geodesic recovered by barycentric projection of `plan` (source mu, target nu).
/// Always flagged approximate.
OmegaGap plan_omega_gap(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu,
                        const TransportPlan& plan);

struct ThetaValue {
  double theta = 0.0;
  double numerator = 0.0;      // int g_{-x}(-x, grad(-rho)) dx
  double second_moment = 0.0;  // int ||-x||^2 rho dx
};

/// Midpoint-rule value on the grid with central differences for D rho.
ThetaValue theta(const NormSpec& norm, const GridDensity& rho);

enum class SpeedMethod { Exact, Sinkhorn };

/// Forward difference W2(mu_k, mu_{k+1}) / (t_{k+1} - t_k).
double metric_speed(const NormSpec& norm, const std::vector<GridDensity>& frames, const std::vector<double>& times,
                    int index, SpeedMethod method = SpeedMethod::Sinkhorn);

/// F_mu(Phi) = (int g_Phi(Phi, Phi) dmu)^(1/2).
double field_norm(const NormSpec& norm, const GridDensity& mu, const VectorField& field);

}  // namespace minkflow
