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

#include <cmath>
#include <numbers>
#include <vector>

#include "minkflow/types.hpp"

namespace minkflow {

struct GaussRule {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;  // weights summing to 1
};

/// Gauss-Legendre rule with `n` nodes mapped to [0, 1].
inline GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = 0.5 * (1.0 - z);
    r.w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

struct PlanarPoint {
  Vec x;
  double w;  // absolute weight (area included)
};

/// Collapsed (Duffy) rule on the triangle (v0, v1, v2); the vertex v0 may carry a
/// point singularity of the integrand. `levels` splits the outer edge into that many fans.
inline std::vector<PlanarPoint> triangle_rule(const Vec& v0, const Vec& v1, const Vec& v2, int order,
                                              int levels = 1) {
  GaussRule g = gauss_legendre(order);
  std::vector<PlanarPoint> pts;
  pts.reserve(static_cast<size_t>(order) * order * levels);
  for (int l = 0; l < levels; ++l) {
    Vec a = v1 + (v2 - v1) * (static_cast<double>(l) / levels);
    Vec b = v1 + (v2 - v1) * (static_cast<double>(l + 1) / levels);
    Vec e1 = a - v0, e2 = b - a;
    double det = std::abs(e1(0) * e2(1) - e1(1) * e2(0));
    for (int i = 0; i < order; ++i) {
      for (int j = 0; j < order; ++j) {
        double xi = g.x[i], eta = g.x[j];
        Vec x = v0 + xi * (e1 + eta * e2);
        pts.push_back({x, g.w[i] * g.w[j] * xi * det});
      }
    }
  }
  return pts;
}

}  // namespace minkflow
