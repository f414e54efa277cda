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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minkflow/norms.hpp"

namespace minkflow {

enum class PotentialKind { SquaredReverseNorm, SquaredDistance, Quadratic };

/// f(x) = scale * {||-x||^2/2, ||z-x||^2/2, <x-m, Q(x-m)>/2}.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::SquaredReverseNorm;
  double scale = 1.0;
  Vec z;       // squared_distance target
  Mat Q;       // quadratic matrix
  Vec center;  // quadratic center m

  static PotentialSpec squared_reverse_norm(double scale = 1.0);
  static PotentialSpec squared_distance(const Vec& z, double scale = 1.0);
  static PotentialSpec quadratic(const Mat& Q, const Vec& center, double scale = 1.0);

  std::string describe() const;
};

double potential_value(const NormSpec& norm, const PotentialSpec& pot, const Vec& x);
/// Differential Df(x) as a covector.
Vec potential_differential(const NormSpec& norm, const PotentialSpec& pot, const Vec& x);
/// Gradient vector of -f: L*(D(-f)(x)).
Vec neg_gradient(const NormSpec& norm, const PotentialSpec& pot, const Vec& x);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  double dt = 0.0;
  int substeps = 0;  // extra subdivisions triggered by the Richardson check
  std::string norm_id;
  std::string potential_id;
};

/// RK4 on xi' = grad(-f)(xi) with a step-doubling error check per step.
Trajectory gradient_curve(const NormSpec& norm, const PotentialSpec& pot, const Vec& x0, double t_end, double dt);

/// -[g_v(v, grad(-f)(y)) - g_v(v, grad(-f)(x))] / ||v||^2 with v = y - x.
double skew_quotient(const NormSpec& norm, const PotentialSpec& pot, const Vec& x, const Vec& y);

struct QuotientSummary {
  double min = 0.0, p10 = 0.0, median = 0.0, p90 = 0.0, max = 0.0, mean = 0.0;
};

struct SkewReport {
  double inf_quotient = 0.0;
  std::pair<Vec, Vec> argmin_pair;
  int samples = 0;
  QuotientSummary summary;  // over the random samples, before refinement
  double reference_K = 1.0;  // only set by distance_skew_check
};

SkewReport skew_estimate(const NormSpec& norm, const PotentialSpec& pot, int sample_count, double region_radius,
                         std::uint64_t seed);

struct Witness {
  Vec x, y;
  double quotient = 0.0;
};

std::optional<Witness> witness_search(const NormSpec& norm, const PotentialSpec& pot, double threshold_K,
                                      int sample_count = 4096, double region_radius = 2.0, std::uint64_t seed = 0);

/// Largest K with d(t) <= e^{-Kt} d(0) (1 + 1e-6) over all sampled pairs and mesh times.
/// `extra_pairs` are integrated in addition to `pair_count` random pairs in the ball of `radius`.
double contraction_fit(const NormSpec& norm, const PotentialSpec& pot, int pair_count, double t_end, double dt,
                       std::uint64_t seed, const std::vector<std::pair<Vec, Vec>>& extra_pairs = {},
                       double radius = 2.0);

struct DistanceSkewConfig {
  double k = 0.0;
  double delta = 0.0;
  double r = 1.0;
  Vec z;
};

/// K(k, S, delta, r); only the k = delta = 0 limit is supported, where it equals 1.
double distance_skew_constant(const DistanceSkewConfig& cfg);

SkewReport distance_skew_check(const NormSpec& norm, const DistanceSkewConfig& cfg, int samples,
                               std::uint64_t seed = 0);

}  // namespace minkflow
