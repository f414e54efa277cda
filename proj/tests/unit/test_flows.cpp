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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "minkflow/flows.hpp"

using namespace minkflow;
using fixtures::mat2;

namespace {

PotentialSpec quad_identity() { return PotentialSpec::quadratic(Mat::Identity(2, 2), Vec::Zero(2)); }

}  // namespace

TEST_CASE("potential gradients") {
  for (const auto& [name, spec] : fixtures::norm_matrix()) {
    CAPTURE(name);
    const int n = spec.dim();
    minkflow::Rng rng(1);
    Vec z = random_gaussian_vec(rng, n);
    for (int i = 0; i < 50; ++i) {
      Vec x = random_gaussian_vec(rng, n);
      CHECK((neg_gradient(spec, PotentialSpec::squared_reverse_norm(), x) + x).norm() < 1e-10 * x.norm());
      CHECK((neg_gradient(spec, PotentialSpec::squared_distance(z), x) - (z - x)).norm() < 1e-10 * (z - x).norm());
      // Differential against central differences of the value.
      auto pot = PotentialSpec::squared_distance(z, 2.5);
      Vec df = potential_differential(spec, pot, x);
      for (int k = 0; k < n; ++k) {
        Vec a = x, b = x;
        a(k) += 1e-6;
        b(k) -= 1e-6;
        double fd = (potential_value(spec, pot, a) - potential_value(spec, pot, b)) / 2e-6;
        CHECK(std::abs(fd - df(k)) < 1e-6 * (1.0 + std::abs(df(k))));
      }
    }
    CHECK(neg_gradient(spec, PotentialSpec::squared_distance(z), z).norm() == 0.0);
  }
  CHECK_THROWS_AS(PotentialSpec::quadratic(mat2(1, 0, 0, -1), Vec::Zero(2)), Error);
  CHECK_THROWS_AS(PotentialSpec::squared_reverse_norm(0.0), Error);
}

TEST_CASE("gradient curves") {
  SUBCASE("squared reverse norm contracts radially for any norm") {
    for (const auto& [name, spec] : fixtures::norm_matrix()) {
      CAPTURE(name);
      minkflow::Rng rng(2);
      Vec x0 = random_gaussian_vec(rng, spec.dim());
      auto tr = gradient_curve(spec, PotentialSpec::squared_reverse_norm(), x0, 1.0, 1e-2);
      CHECK(tr.times.size() == tr.states.size());
      CHECK(std::abs(tr.times.back() - 1.0) < 1e-12);
      CHECK((tr.states.back() - std::exp(-1.0) * x0).norm() < 1e-6);
    }
  }
  SUBCASE("linear flow") {
    Vec x0 = make_vec({1.5, -0.7});
    auto tr = gradient_curve(NormSpec::euclidean(2), quad_identity(), x0, 1.0, 1e-2);
    for (size_t k = 0; k < tr.times.size(); ++k) {
      CHECK((tr.states[k] - std::exp(-tr.times[k]) * x0).norm() < 1e-9);
    }
  }
  SUBCASE("self convergence on l4") {
    auto l4 = NormSpec::regularized_p(4.0, 1e-3, 2);
    Vec x0 = make_vec({1.2, 0.4});
    auto coarse = gradient_curve(l4, quad_identity(), x0, 1.0, 1e-2);
    auto fine = gradient_curve(l4, quad_identity(), x0, 1.0, 1e-3);
    for (size_t k = 0; k < coarse.times.size(); ++k) {
      CHECK((coarse.states[k] - fine.states[10 * k]).norm() < 1e-6);
    }
  }
  SUBCASE("fourth order under step halving") {
    auto l4 = NormSpec::regularized_p(4.0, 1e-3, 2);
    auto pot = PotentialSpec::quadratic(mat2(2.0, 0.5, 0.5, 1.0), make_vec({0.2, 0.0}));
    Vec x0 = make_vec({1.2, 0.9});
    auto ref = gradient_curve(l4, pot, x0, 1.0, 1.25e-4);
    auto a = gradient_curve(l4, pot, x0, 1.0, 0.01);
    auto b = gradient_curve(l4, pot, x0, 1.0, 0.005);
    REQUIRE(a.substeps == 0);
    REQUIRE(b.substeps == 0);
    double ea = (a.states.back() - ref.states.back()).norm();
    double eb = (b.states.back() - ref.states.back()).norm();
    CHECK(ea / eb >= 8.0);
  }
  CHECK_THROWS_AS(gradient_curve(NormSpec::euclidean(2), quad_identity(), Vec::Zero(2), 1.0, 0.0), Error);
  CHECK_THROWS_AS(gradient_curve(NormSpec::euclidean(2), quad_identity(), Vec::Zero(2), 0.001, 0.01), Error);
}

TEST_CASE("skew quotient identities") {
  for (const auto& [name, spec] : fixtures::norm_matrix()) {
    CAPTURE(name);
    minkflow::Rng rng(3);
    const auto srn = PotentialSpec::squared_reverse_norm();
    for (int i = 0; i < 200; ++i) {
      Vec x = random_gaussian_vec(rng, spec.dim()), y = random_gaussian_vec(rng, spec.dim());
      double q = skew_quotient(spec, srn, x, y);
      CHECK(std::abs(q - 1.0) < 1e-10);
      CHECK(std::abs(skew_quotient(spec, srn, 3.7 * x, 3.7 * y) - q) < 1e-10);
      if (spec.dim() == 2) {
        auto p1 = PotentialSpec::quadratic(mat2(2.0, 0.5, 0.5, 1.0), make_vec({0.1, 0.2}));
        auto p3 = PotentialSpec::quadratic(mat2(2.0, 0.5, 0.5, 1.0), make_vec({0.1, 0.2}), 3.0);
        double q1 = skew_quotient(spec, p1, x, y), q3 = skew_quotient(spec, p3, x, y);
        CHECK(std::abs(q3 - 3.0 * q1) < 1e-10 * std::abs(q3));
      }
    }
    Vec x = Vec::Ones(spec.dim());
    try {
      skew_quotient(spec, srn, x, x);
      FAIL("expected CoincidentPoints");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CoincidentPoints);
    }
  }

  // Euclidean reduction: the Rayleigh quotient of Q.
  Mat Q = mat2(2.0, 0.5, 0.5, 1.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(Q);
  minkflow::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    Vec x = random_gaussian_vec(rng, 2), y = random_gaussian_vec(rng, 2);
    Vec v = y - x;
    double q = skew_quotient(NormSpec::euclidean(2), PotentialSpec::quadratic(Q, Vec::Zero(2)), x, y);
    CHECK(std::abs(q - v.dot(Q * v) / v.squaredNorm()) < 1e-12);
    CHECK(q >= es.eigenvalues()(0) - 1e-12);
    CHECK(q <= es.eigenvalues()(1) + 1e-12);
  }
}

TEST_CASE("the (-v, 0) pair on a strongly sheared l8 norm") {
  // Grid search over v for Q(-v, 0) = <L(v), L*(v)> / ||v||^2.
  auto spec = NormSpec::regularized_p(8.0, 1e-3, mat2(1.0, 1.5, 0.0, 1.0));
  double best = 1e9;
  Vec best_v;
  for (int i = 0; i < 4096; ++i) {
    double th = 2 * std::numbers::pi * i / 4096;
    Vec v = make_vec({std::cos(th), std::sin(th)});
    double q = skew_quotient(spec, quad_identity(), -v, Vec::Zero(2));
    Vec L = spec.legendre(v), Ls = spec.legendre_inverse(v);
    CHECK(std::abs(q - L.dot(Ls) / std::pow(spec.value(v), 2)) < 1e-10 * (1.0 + std::abs(q)));
    if (q < best) {
      best = q;
      best_v = v;
    }
  }
  CHECK(best < -0.5);
  // The pair separates.
  double K = contraction_fit(spec, quad_identity(), 0, 0.2, 1e-3, 0, {{-best_v, Vec::Zero(2)}});
  CHECK(K < 0.0);
}

TEST_CASE("skew estimates") {
  for (const auto& [name, spec] : fixtures::norm_matrix()) {
    CAPTURE(name);
    auto rep = skew_estimate(spec, PotentialSpec::squared_reverse_norm(), 256, 2.0, 5);
    CHECK(std::abs(rep.inf_quotient - 1.0) < 1e-8);
    CHECK(rep.inf_quotient <= rep.summary.min);
    CHECK(skew_quotient(spec, PotentialSpec::squared_reverse_norm(), rep.argmin_pair.first,
                        rep.argmin_pair.second) == rep.inf_quotient);
    minkflow::Rng rng(6);
    Vec z = random_gaussian_vec(rng, spec.dim());
    auto dist = skew_estimate(spec, PotentialSpec::squared_distance(z), 256, 2.0, 5);
    CHECK(dist.inf_quotient >= 1.0 - 1e-6);
  }
  Mat Q = mat2(2.0, 0.5, 0.5, 1.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(Q);
  auto rep = skew_estimate(NormSpec::euclidean(2), PotentialSpec::quadratic(Q, Vec::Zero(2)), 1024, 2.0, 7);
  CHECK(std::abs(rep.inf_quotient - es.eigenvalues()(0)) < 1e-6);
  CHECK(rep.summary.min <= rep.summary.median);
  CHECK(rep.summary.median <= rep.summary.max);

  // Same seed, same report.
  auto again = skew_estimate(NormSpec::euclidean(2), PotentialSpec::quadratic(Q, Vec::Zero(2)), 1024, 2.0, 7);
  CHECK(again.inf_quotient == rep.inf_quotient);
}

TEST_CASE("witness search") {
  auto l8 = fixtures::sheared_l8();
  CHECK_FALSE(witness_search(l8, PotentialSpec::squared_reverse_norm(), 0.99).has_value());
  CHECK_FALSE(witness_search(NormSpec::euclidean(2), quad_identity(), 0.5).has_value());
  auto w = witness_search(l8, quad_identity(), 0.0);
  REQUIRE(w.has_value());
  CHECK(w->quotient < -0.01);
  CHECK(skew_quotient(l8, quad_identity(), w->x, w->y) == w->quotient);
}

TEST_CASE("contraction fit") {
  auto l4 = NormSpec::regularized_p(4.0, 1e-3, 2);
  CHECK(std::abs(contraction_fit(l4, PotentialSpec::squared_reverse_norm(), 8, 1.0, 1e-2, 1) - 1.0) < 1e-4);

  Mat Q = mat2(1.0, 0.0, 0.0, 3.0);
  auto pot = PotentialSpec::quadratic(Q, Vec::Zero(2));
  auto rep = skew_estimate(NormSpec::euclidean(2), pot, 512, 2.0, 2);
  double K = contraction_fit(NormSpec::euclidean(2), pot, 8, 1.0, 1e-3, 3, {rep.argmin_pair});
  CHECK(std::abs(K - 1.0) < 1e-3);

  auto l8 = fixtures::sheared_l8();
  auto w = witness_search(l8, quad_identity(), 0.0);
  REQUIRE(w.has_value());
  double Kw = contraction_fit(l8, quad_identity(), 4, 1.0, 1e-3, 4, {{w->x, w->y}});
  CHECK(Kw < 0.0);
  CHECK(std::abs(Kw - w->quotient) <= 0.05);
}

TEST_CASE("distance skew check") {
  for (const auto& [name, spec] : fixtures::norm_matrix()) {
    CAPTURE(name);
    DistanceSkewConfig cfg;
    cfg.r = 1.5;
    cfg.z = Vec::Zero(spec.dim());
    auto rep = distance_skew_check(spec, cfg, 256);
    CHECK(rep.inf_quotient >= 1.0 - 1e-6);
    CHECK(rep.reference_K == 1.0);
    // Sampled points stay in the reverse ball.
    CHECK(spec.value(cfg.z - rep.argmin_pair.first) <= cfg.r * (1 + 1e-12));
  }
  DistanceSkewConfig e;
  e.r = 2.0;
  e.z = make_vec({3.0, -1.0});
  CHECK(std::abs(distance_skew_check(NormSpec::euclidean(2), e, 256).inf_quotient - 1.0) < 1e-8);
  e.k = 0.1;
  try {
    distance_skew_check(NormSpec::euclidean(2), e, 16);
    FAIL("expected UnsupportedCurvature");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::UnsupportedCurvature);
  }
}
