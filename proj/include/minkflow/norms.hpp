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

#include <memory>
#include <string>
#include <variant>

#include "minkflow/types.hpp"

namespace minkflow {

class NormSpec;

enum class NormFamily { Quadratic, RegularizedP, ShiftedBall, Reversed };

struct QuadraticParams {
  Mat A;
};

/// ||x|| = sqrt(||Sx||_p^2 + eps |Sx|_2^2).
struct RegularizedPParams {
  double p = 4.0;
  double eps = 0.0;
  Mat shear;
};

/// Gauge of the unit Euclidean ball centred at c, |c| < 1.
struct ShiftedBallParams {
  Vec center;
};

/// ||x|| = inner(-x).
struct ReversedParams {
  std::shared_ptr<const NormSpec> inner;
};

struct EllipticityBounds {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
};

struct UniformConstants {
  double c_const = 1.0;
  double s_const = 1.0;
  int resolution = 0;
};

struct MetricTensor {
  Vec at;
  Mat entries;
};

/// Immutable Minkowski norm. Copies share state.
class NormSpec {
 public:
  using Params = std::variant<QuadraticParams, RegularizedPParams, ShiftedBallParams, ReversedParams>;

  static NormSpec quadratic(const Mat& A);
  static NormSpec euclidean(int dim);
  static NormSpec regularized_p(double p, double eps, const Mat& shear);
  static NormSpec regularized_p(double p, double eps, int dim);
  static NormSpec shifted_ball(const Vec& center);
  static NormSpec reversed(const NormSpec& inner);

  int dim() const { return state_->dim; }
  NormFamily family() const;
  const Params& params() const { return state_->params; }
  std::string describe() const;

  double value(const Vec& x) const;
  /// L(x) = (1/2) grad ||.||^2 at x; zero at the origin.
  Vec legendre(const Vec& x) const;
  /// (1/2) Hessian of ||.||^2, without positivity checks.
  Mat hessian(const Vec& x) const;
  /// L(x) and g(x) together; cheaper than two calls.
  void legendre_and_hessian(const Vec& x, Vec& L, Mat& g) const;
  Vec legendre_inverse(const Vec& w) const;
  Vec legendre_inverse(const Vec& w, const Vec& hint) const;

  /// Eigenvalue range of g over a fixed direction sample, computed once at construction.
  const EllipticityBounds& cached_bounds() const { return state_->cached; }

 private:
  struct State {
    int dim = 0;
    Params params;
    EllipticityBounds cached;
  };
  explicit NormSpec(std::shared_ptr<const State> s) : state_(std::move(s)) {}
  static NormSpec make(int dim, Params params);

  std::shared_ptr<const State> state_;
};

double norm_eval(const NormSpec& spec, const Vec& x);
MetricTensor metric_tensor(const NormSpec& spec, const Vec& x);
double inner_g(const NormSpec& spec, const Vec& x, const Vec& a, const Vec& b);
Vec legendre(const NormSpec& spec, const Vec& x);
Vec legendre_inverse(const NormSpec& spec, const Vec& w);
Vec gradient_vector(const NormSpec& spec, const Vec& df);
/// ||w||_* through the round trip ||L*(w)||.
double dual_norm(const NormSpec& spec, const Vec& w);
UniformConstants uniform_constants(const NormSpec& spec, int angular_resolution);
EllipticityBounds ellipticity_bounds(const NormSpec& spec, int samples);
NormSpec reverse_norm(const NormSpec& spec);
/// True when ||x|| == ||-x|| within 1e-12 relative on a fixed sample.
bool is_symmetric(const NormSpec& spec, int samples = 512);

/// Unit directions used by the samplers: angles in 2D, a seeded sequence otherwise.
Vec sample_direction(int dim, long index, long count);

}  // namespace minkflow
