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
#include <cmath>
#include <random>

#include "minkflow/types.hpp"

namespace minkflow {

/// Derives an independent stream seed for sample `index` of a run seeded with `seed`.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Vec random_gaussian_vec(Rng& rng, int dim) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = nd(rng);
  return v;
}

/// Uniform sample in the Euclidean ball of the given radius.
inline Vec random_in_ball(Rng& rng, int dim, double radius) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Vec v = random_gaussian_vec(rng, dim);
  double n = v.norm();
  if (n == 0.0) return Vec::Zero(dim);
  return v * (radius * std::pow(ud(rng), 1.0 / dim) / n);
}

}  // namespace minkflow
