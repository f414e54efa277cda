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

#include "minkflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "minkflow/random.hpp"

namespace minkflow {

PotentialSpec PotentialSpec::squared_reverse_norm(double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "potential scale must be > 0");
  PotentialSpec p;
  p.kind = PotentialKind::SquaredReverseNorm;
  p.scale = scale;
  return p;
}

PotentialSpec PotentialSpec::squared_distance(const Vec& z, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "potential scale must be > 0");
  PotentialSpec p;
  p.kind = PotentialKind::SquaredDistance;
  p.scale = scale;
  p.z = z;
  return p;
}

PotentialSpec PotentialSpec::quadratic(const Mat& Q, const Vec& center, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "potential scale must be > 0");
  if (Q.rows() != Q.cols() || Q.rows() != center.size()) {
    throw Error(ErrorKind::DimensionMismatch, "quadratic potential matrix and center disagree");
  }
  if ((Q - Q.transpose()).norm() > 1e-12 * (1.0 + Q.norm())) {
    throw Error(ErrorKind::InvalidArgument, "quadratic potential matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "quadratic potential matrix must be positive definite");
  }
  PotentialSpec p;
  p.kind = PotentialKind::Quadratic;
  p.scale = scale;
  p.Q = Q;
  p.center = center;
  return p;
}

std::string PotentialSpec::describe() const {
  std::string s;
  switch (kind) {
    case PotentialKind::SquaredReverseNorm: s = "squared_reverse_norm"; break;
    case PotentialKind::SquaredDistance: s = "squared_distance"; break;
    case PotentialKind::Quadratic: s = "quadratic"; break;
  }
  if (scale != 1.0) s += "*" + std::to_string(scale);
  return s;
}

namespace {

void check_pot_dim(const NormSpec& norm, const PotentialSpec& pot, const Vec& x) {
  if (x.size() != norm.dim()) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from norm");
  if (pot.kind == PotentialKind::SquaredDistance && pot.z.size() != norm.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "potential target dimension differs from norm");
  }
  if (pot.kind == PotentialKind::Quadratic && pot.center.size() != norm.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "potential dimension differs from norm");
  }
}

}  // namespace

double potential_value(const NormSpec& norm, const PotentialSpec& pot, const Vec& x) {
  check_pot_dim(norm, pot, x);
  switch (pot.kind) {
    case PotentialKind::SquaredReverseNorm: {
      double v = norm.value(-x);
      return pot.scale * 0.5 * v * v;
    }
    case PotentialKind::SquaredDistance: {
      double v = norm.value(pot.z - x);
      return pot.scale * 0.5 * v * v;
    }
    case PotentialKind::Quadratic: {
      Vec d = x - pot.center;
      return pot.scale * 0.5 * d.dot(pot.Q * d);
    }
  }
  return 0.0;
}

Vec potential_differential(const NormSpec& norm, const PotentialSpec& pot, const Vec& x) {
  check_pot_dim(norm, pot, x);
  switch (pot.kind) {
    case PotentialKind::SquaredReverseNorm: return -pot.scale * norm.legendre(-x);
    case PotentialKind::SquaredDistance: return -pot.scale * norm.legendre(pot.z - x);
    case PotentialKind::Quadratic: return pot.scale * (pot.Q * (x - pot.center));
  }
  return Vec::Zero(x.size());
}

Vec neg_gradient(const NormSpec& norm, const PotentialSpec& pot, const Vec& x) {
  return norm.legendre_inverse(-potential_differential(norm, pot, x));
}

namespace {

Vec rk4_step(const NormSpec& norm, const PotentialSpec& pot, const Vec& x, double h) {
  Vec k1 = neg_gradient(norm, pot, x);
  Vec k2 = neg_gradient(norm, pot, x + 0.5 * h * k1);
  Vec k3 = neg_gradient(norm, pot, x + 0.5 * h * k2);
  Vec k4 = neg_gradient(norm, pot, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

constexpr double kLocalErrorPerTime = 1e-8;
constexpr int kMaxSubdivision = 30;

/// Advances by h, subdividing until a full RK4 step and two half steps agree.
Vec checked_step(const NormSpec& norm, const PotentialSpec& pot, const Vec& x, double h, int depth, int& substeps) {
  Vec full = rk4_step(norm, pot, x, h);
  Vec half = rk4_step(norm, pot, rk4_step(norm, pot, x, 0.5 * h), 0.5 * h);
  double err = (half - full).norm() * 16.0 / 15.0;
  if (err <= kLocalErrorPerTime * h * (1.0 + x.norm())) return full;
  if (depth >= kMaxSubdivision) {
    throw Error(ErrorKind::StepSizeUnderflow, "gradient curve step fell below " + std::to_string(h));
  }
  ++substeps;
  Vec mid = checked_step(norm, pot, x, 0.5 * h, depth + 1, substeps);
  return checked_step(norm, pot, mid, 0.5 * h, depth + 1, substeps);
}

}  // namespace

Trajectory gradient_curve(const NormSpec& norm, const PotentialSpec& pot, const Vec& x0, double t_end, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
  if (!(t_end >= dt)) throw Error(ErrorKind::InvalidArgument, "t_end must be >= dt");
  check_pot_dim(norm, pot, x0);
  Trajectory tr;
  tr.dt = dt;
  tr.norm_id = norm.describe();
  tr.potential_id = pot.describe();
  const long steps = std::lround(std::ceil(t_end / dt - 1e-9));
  tr.times.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  Vec x = x0;
  for (long i = 1; i <= steps; ++i) {
    double t_prev = (i - 1) * dt;
    double h = std::min(dt, t_end - t_prev);
    x = checked_step(norm, pot, x, h, 0, tr.substeps);
    if (!x.allFinite()) throw Error(ErrorKind::StepSizeUnderflow, "gradient curve diverged");
    tr.times.push_back(t_prev + h);
    tr.states.push_back(x);
  }
  return tr;
}

double skew_quotient(const NormSpec& norm, const PotentialSpec& pot, const Vec& x, const Vec& y) {
  check_pot_dim(norm, pot, x);
  check_pot_dim(norm, pot, y);
  Vec v = y - x;
  double nv = norm.value(v);
  if (!(nv > 0.0)) throw Error(ErrorKind::CoincidentPoints, "skew quotient needs distinct points");
  Vec Lv = norm.legendre(v);
  double num = Lv.dot(neg_gradient(norm, pot, y)) - Lv.dot(neg_gradient(norm, pot, x));
  return -num / (nv * nv);
}

namespace {

using Sampler = std::function<Vec(Rng&)>;
using Projector = std::function<Vec(const Vec&)>;

QuotientSummary summarize(std::vector<double> q) {
  QuotientSummary s;
  if (q.empty()) return s;
  std::sort(q.begin(), q.end());
  auto pick = [&](double f) { return q[static_cast<size_t>(std::floor(f * (q.size() - 1)))]; };
  s.min = q.front();
  s.max = q.back();
  s.p10 = pick(0.1);
  s.median = pick(0.5);
  s.p90 = pick(0.9);
  double sum = 0.0;
  for (double v : q) sum += v;
  s.mean = sum / q.size();
  return s;
}

SkewReport estimate_impl(const NormSpec& norm, const PotentialSpec& pot, int sample_count, double scale,
                         std::uint64_t seed, const Sampler& sample, const Projector& project) {
  if (sample_count < 1) throw Error(ErrorKind::InvalidArgument, "sample_count must be >= 1");
  const int n = norm.dim();
  std::vector<double> qs;
  qs.reserve(sample_count);
  double best = std::numeric_limits<double>::infinity();
  Vec bx, by;
  for (int i = 0; i < sample_count; ++i) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(i)));
    Vec x = sample(rng), y = sample(rng);
    if ((y - x).norm() < 1e-9 * scale) continue;
    double q = skew_quotient(norm, pot, x, y);
    qs.push_back(q);
    if (q < best) {
      best = q;
      bx = x;
      by = y;
    }
  }
  if (qs.empty()) throw Error(ErrorKind::CoincidentPoints, "all sampled pairs coincided");

  // Coordinate descent on (x, y) from the worst pair.
  double step = 0.1 * scale;
  auto eval = [&](const Vec& x, const Vec& y) {
    if ((y - x).norm() < 1e-9 * scale) return std::numeric_limits<double>::infinity();
    return skew_quotient(norm, pot, x, y);
  };
  for (int it = 0; it < 50; ++it) {
    bool moved = false;
    for (int c = 0; c < 2 * n; ++c) {
      for (double sgn : {1.0, -1.0}) {
        Vec x = bx, y = by;
        if (c < n) {
          x(c) += sgn * step;
          x = project(x);
        } else {
          y(c - n) += sgn * step;
          y = project(y);
        }
        double q = eval(x, y);
        if (q < best) {
          best = q;
          bx = x;
          by = y;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  SkewReport rep;
  rep.inf_quotient = skew_quotient(norm, pot, bx, by);
  rep.argmin_pair = {bx, by};
  rep.samples = static_cast<int>(qs.size());
  rep.summary = summarize(std::move(qs));
  return rep;
}

}  // namespace

SkewReport skew_estimate(const NormSpec& norm, const PotentialSpec& pot, int sample_count, double region_radius,
                         std::uint64_t seed) {
  if (!(region_radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "region_radius must be > 0");
  const int n = norm.dim();
  Sampler sample = [&](Rng& rng) { return random_in_ball(rng, n, region_radius); };
  Projector project = [&](const Vec& x) {
    double r = x.norm();
    return r > region_radius ? Vec(x * (region_radius / r)) : x;
  };
  return estimate_impl(norm, pot, sample_count, region_radius, seed, sample, project);
}

std::optional<Witness> witness_search(const NormSpec& norm, const PotentialSpec& pot, double threshold_K,
                                      int sample_count, double region_radius, std::uint64_t seed) {
  SkewReport rep = skew_estimate(norm, pot, sample_count, region_radius, seed);
  const auto& [x, y] = rep.argmin_pair;
  double q = skew_quotient(norm, pot, x, y);
  if (q < threshold_K) return Witness{x, y, q};
  return std::nullopt;
}

double contraction_fit(const NormSpec& norm, const PotentialSpec& pot, int pair_count, double t_end, double dt,
                       std::uint64_t seed, const std::vector<std::pair<Vec, Vec>>& extra_pairs, double radius) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be > 0");
  std::vector<std::pair<Vec, Vec>> pairs = extra_pairs;
  for (int i = 0; i < pair_count; ++i) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(i)));
    Vec x = random_in_ball(rng, norm.dim(), radius);
    Vec y = random_in_ball(rng, norm.dim(), radius);
    pairs.emplace_back(x, y);
  }
  const double slack = std::log1p(1e-6);
  double K = std::numeric_limits<double>::infinity();
  for (const auto& [x0, y0] : pairs) {
    double d0 = norm.value(y0 - x0);
    if (!(d0 > 0.0)) continue;
    Trajectory a = gradient_curve(norm, pot, x0, t_end, dt);
    Trajectory b = gradient_curve(norm, pot, y0, t_end, dt);
    for (size_t k = 1; k < a.times.size(); ++k) {
      double d = norm.value(b.states[k] - a.states[k]);
      if (!(d > 0.0)) continue;
      K = std::min(K, -(std::log(d / d0) - slack) / a.times[k]);
    }
  }
  if (!std::isfinite(K)) throw Error(ErrorKind::CoincidentPoints, "no distinct pairs to fit");
  return K;
}

double distance_skew_constant(const DistanceSkewConfig& cfg) {
  if (cfg.k != 0.0 || cfg.delta != 0.0) {
    throw Error(ErrorKind::UnsupportedCurvature, "only k = delta = 0 is supported on Minkowski spaces");
  }
  return 1.0;
}

SkewReport distance_skew_check(const NormSpec& norm, const DistanceSkewConfig& cfg, int samples,
                               std::uint64_t seed) {
  double Kref = distance_skew_constant(cfg);
  if (!(cfg.r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be > 0");
  const int n = norm.dim();
  Vec z = cfg.z.size() == 0 ? Vec(Vec::Zero(n)) : cfg.z;
  if (z.size() != n) throw Error(ErrorKind::DimensionMismatch, "center dimension differs from norm");
  PotentialSpec pot = PotentialSpec::squared_distance(z);
  // Reverse ball {x : ||z - x|| < r}.
  Sampler sample = [&](Rng& rng) {
    Vec u = random_gaussian_vec(rng, n);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    double rho = cfg.r * std::pow(ud(rng), 1.0 / n);
    return Vec(z - u * (rho / norm.value(u)));
  };
  Projector project = [&](const Vec& x) {
    double d = norm.value(z - x);
    return d > cfg.r ? Vec(z - (z - x) * (cfg.r / d)) : x;
  };
  SkewReport rep = estimate_impl(norm, pot, samples, cfg.r, seed, sample, project);
  rep.reference_K = Kref;
  return rep;
}

}  // namespace minkflow
