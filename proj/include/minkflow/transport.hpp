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

#include "minkflow/grid.hpp"

namespace minkflow {

enum class TransportMethod { Exact, Sinkhorn };

struct PlanEntry {
  long source;  // node index in the source grid
  long target;  // node index in the target grid
  double mass;
};

/// Coupling of two grid densities under the oriented cost ||y - x||^2.
struct TransportPlan {
  std::vector<PlanEntry> entries;
  double cost = 0.0;          // sum pi(x, y) ||y - x||^2 (debiased divergence for Sinkhorn)
  double primal_cost = 0.0;   // <C, pi> of the returned plan
  double marginal_err = 0.0;  // total variation of both marginal violations
  TransportMethod method = TransportMethod::Exact;
  double eps_final = 0.0;
  long iterations = 0;  // simplex pivots or Sinkhorn sweeps

  double w2() const;
};

/// Largest support handled by the exact solver, per side.
inline constexpr long kMaxExactSupport = 2500;

TransportPlan w2_exact(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu);

struct SinkhornOptions {
  double eps_final = 0.0;  // 0 picks 1e-4 * diameter^2
  double eps_start = 0.0;  // 0 picks diameter^2 / 8
  double tolerance = 1e-6;
  long max_iterations = 200000;
  bool debias = true;
};

TransportPlan w2_sinkhorn(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu,
                          const SinkhornOptions& opts = {});

/// Largest pair cost max ||y - x||^2 over x in supp mu, y in supp nu; the Sinkhorn eps scale.
double support_diameter_sq(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu);

}  // namespace minkflow
