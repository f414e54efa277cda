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

#include "minkflow/norms.hpp"
#include "minkflow/random.hpp"

namespace fixtures {

using minkflow::Mat;
using minkflow::NormSpec;
using minkflow::Vec;

struct NamedNorm {
  std::string name;
  NormSpec spec;
};

inline Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline NormSpec sheared_l8() { return NormSpec::regularized_p(8.0, 1e-3, mat2(1.0, 0.9, 0.0, 1.0)); }

/// One representative per family, plus a 3D member.
inline std::vector<NamedNorm> norm_matrix() {
  return {
      {"euclidean", NormSpec::euclidean(2)},
      {"quadratic", NormSpec::quadratic(mat2(2.0, 0.5, 0.5, 1.0))},
      {"l4_eps1e-3", NormSpec::regularized_p(4.0, 1e-3, 2)},
      {"sheared_l8", sheared_l8()},
      {"shifted_ball", NormSpec::shifted_ball(minkflow::make_vec({0.5, 0.0}))},
      {"reversed_ball", NormSpec::reversed(NormSpec::shifted_ball(minkflow::make_vec({0.3, -0.2})))},
      {"l4_3d", NormSpec::regularized_p(4.0, 1e-3, 3)},
  };
}

/// Random point with every coordinate bounded away from zero by 0.05.
inline Vec off_axis(minkflow::Rng& rng, int dim) {
  std::uniform_real_distribution<double> mag(0.05, 2.0);
  std::bernoulli_distribution sign(0.5);
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x(i) = (sign(rng) ? 1.0 : -1.0) * mag(rng);
  return x;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace fixtures
