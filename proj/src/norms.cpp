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

#include "minkflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "minkflow/optimize.hpp"
#include "minkflow/random.hpp"

namespace minkflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DegenerateHessian: return "DegenerateHessian";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::UnsupportedCurvature: return "UnsupportedCurvature";
    case ErrorKind::ZeroMass: return "ZeroMass";
    case ErrorKind::SupportTooLarge: return "SupportTooLarge";
    case ErrorKind::InfeasibleMarginals: return "InfeasibleMarginals";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateScale: return "DegenerateScale";
    case ErrorKind::ZeroSecondMoment: return "ZeroSecondMoment";
    case ErrorKind::StabilityViolation: return "StabilityViolation";
    case ErrorKind::NegativeDensity: return "NegativeDensity";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::AsymmetricNorm: return "AsymmetricNorm";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::InvalidTriple: return "InvalidTriple";
    case ErrorKind::SupportOverflow: return "SupportOverflow";
    case ErrorKind::InconclusiveSlope: return "InconclusiveSlope";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

namespace {

constexpr double kHessianFloor = 1e-12;
constexpr int kNewtonMaxIter = 100;

void check_dim(const NormSpec& spec, const Vec& x) {
  if (x.size() != spec.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected dimension " + std::to_string(spec.dim()) + ", got " + std::to_string(x.size()));
  }
}

/// |t|^e, with a multiplication fast path for small integer exponents.
inline double abs_pow(double t, double e, int ie) {
  double a = std::abs(t);
  if (ie >= 0) {
    double r = 1.0;
    for (int i = 0; i < ie; ++i) r *= a;
    return r;
  }
  return a == 0.0 ? 0.0 : std::pow(a, e);
}

inline int integer_exponent(double e) {
  double r = std::round(e);
  return (std::abs(e - r) < 1e-15 && r >= 0 && r <= 16) ? static_cast<int>(r) : -1;
}

struct LpEval {
  double value = 0.0;
  Vec L;
  Mat g;
};

/// Regularized l_p in the sheared frame y = Sx. Works on z = y / max|y_i| to avoid overflow.
void lp_eval(const RegularizedPParams& P, const Vec& x, double* value, Vec* L, Mat* g) {
  const int n = static_cast<int>(x.size());
  Vec y = P.shear * x;
  double m = y.cwiseAbs().maxCoeff();
  if (m == 0.0) {
    if (value) *value = 0.0;
    if (L) *L = Vec::Zero(n);
    if (g) *g = Mat::Zero(n, n);
    return;
  }
  const double p = P.p;
  const int ip = integer_exponent(p);
  const int ip2 = integer_exponent(p - 2.0);
  Vec z = y / m;
  Vec a(n);  // |z_i|^{p-2}
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    a(i) = abs_pow(z(i), p - 2.0, ip2);
    s += ip >= 0 ? abs_pow(z(i), p, ip) : a(i) * z(i) * z(i);
  }
  const double z2 = z.squaredNorm();
  // N^2 = s^{2/p}; N^{2-p} = s^{(2-p)/p}.
  const double N2 = (p == 4.0) ? std::sqrt(s) : std::pow(s, 2.0 / p);
  if (value) *value = m * std::sqrt(N2 + P.eps * z2);
  if (!L && !g) return;
  const double N2mp = N2 / s;  // N^{2-p}
  Vec q = a.cwiseProduct(z);
  if (L) {
    Vec Ly = m * (N2mp * q + P.eps * z);
    *L = P.shear.transpose() * Ly;
  }
  if (g) {
    Mat gy = (2.0 - p) * (N2mp / s) * (q * q.transpose());  // N^{2-2p} = N^{2-p} / s
    for (int i = 0; i < n; ++i) gy(i, i) += (p - 1.0) * N2mp * a(i) + P.eps;
    *g = P.shear.transpose() * gy * P.shear;
  }
}

void ball_eval(const ShiftedBallParams& P, const Vec& x, double* value, Vec* L, Mat* g) {
  const int n = static_cast<int>(x.size());
  const Vec& c = P.center;
  const double k = 1.0 - c.squaredNorm();
  const double s = x.dot(c);
  const double x2 = x.squaredNorm();
  if (x2 == 0.0) {
    if (value) *value = 0.0;
    if (L) *L = Vec::Zero(n);
    if (g) *g = Mat::Zero(n, n);
    return;
  }
  const double r = std::sqrt(s * s + k * x2);
  // -s + r suffers cancellation when x is nearly parallel to c; use the conjugate form then.
  const double F = s > 0.0 ? x2 / (s + r) : (r - s) / k;
  if (value) *value = F;
  if (!L && !g) return;
  Vec u = s * c + k * x;
  Vec dF = (u / r - c) / k;
  if (L) *L = F * dF;
  if (g) {
    Mat H = (c * c.transpose()) / r;
    for (int i = 0; i < n; ++i) H(i, i) += k / r;
    H -= (u * u.transpose()) / (r * r * r);
    H /= k;
    *g = dF * dF.transpose() + F * H;
  }
}

void eval_all(const NormSpec& spec, const Vec& x, double* value, Vec* L, Mat* g) {
  const auto& params = spec.params();
  switch (params.index()) {
    case 0: {
      const auto& P = std::get<QuadraticParams>(params);
      Vec Ax = P.A * x;
      if (value) *value = std::sqrt(std::max(0.0, x.dot(Ax)));
      if (L) *L = Ax;
      if (g) *g = P.A;
      return;
    }
    case 1: lp_eval(std::get<RegularizedPParams>(params), x, value, L, g); return;
    case 2: ball_eval(std::get<ShiftedBallParams>(params), x, value, L, g); return;
    default: {
      const auto& inner = *std::get<ReversedParams>(params).inner;
      Vec mx = -x;
      eval_all(inner, mx, value, L, g);
      if (L) *L = -*L;
      return;
    }
  }
}

Mat check_square(const Mat& A, int dim, const char* what) {
  if (A.rows() != dim || A.cols() != dim) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be " + std::to_string(dim) + "x" +
                                                  std::to_string(dim));
  }
  return A;
}

void check_dim_range(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorKind::InvalidArgument, "dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
}

double min_eig(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

EllipticityBounds scan_bounds(const NormSpec& spec, int samples, bool strict) {
  EllipticityBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < samples; ++i) {
    Vec x = sample_direction(spec.dim(), i, samples);
    Mat g = spec.hessian(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues()(0);
    double hi = es.eigenvalues()(spec.dim() - 1);
    if (strict && !(lo >= kHessianFloor)) {
      throw Error(ErrorKind::DegenerateHessian, "metric tensor has eigenvalue " + std::to_string(lo));
    }
    b.lambda_lo = std::min(b.lambda_lo, lo);
    b.lambda_hi = std::max(b.lambda_hi, hi);
  }
  b.lambda_lo = std::max(b.lambda_lo, 0.0);
  return b;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Vec sample_direction(int dim, long index, long count) {
  Vec v(dim);
  if (dim == 1) {
    v(0) = (index % 2 == 0) ? 1.0 : -1.0;
    return v;
  }
  if (dim == 2) {
    double th = 2.0 * std::numbers::pi * static_cast<double>(index) / static_cast<double>(count);
    v << std::cos(th), std::sin(th);
    return v;
  }
  if (index < 2 * dim) {
    v.setZero();
    v(index / 2) = (index % 2 == 0) ? 1.0 : -1.0;
    return v;
  }
  Rng rng(split_seed(0x5eedu, static_cast<std::uint64_t>(index)));
  do {
    v = random_gaussian_vec(rng, dim);
  } while (v.norm() < 1e-8);
  return v / v.norm();
}

NormSpec NormSpec::make(int dim, Params params) {
  auto st = std::make_shared<State>();
  st->dim = dim;
  st->params = std::move(params);
  NormSpec spec(st);
  st->cached = scan_bounds(spec, dim == 1 ? 2 : 128, false);
  return spec;
}

NormSpec NormSpec::quadratic(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  check_dim_range(n);
  check_square(A, n, "quadratic matrix");
  if ((A - A.transpose()).norm() > 1e-12 * (1.0 + A.norm())) {
    throw Error(ErrorKind::InvalidArgument, "quadratic matrix must be symmetric");
  }
  Mat S = 0.5 * (A + A.transpose());
  if (!(min_eig(S) > 0.0)) throw Error(ErrorKind::InvalidArgument, "quadratic matrix must be positive definite");
  return make(n, QuadraticParams{S});
}

NormSpec NormSpec::euclidean(int dim) {
  check_dim_range(dim);
  return quadratic(Mat::Identity(dim, dim));
}

NormSpec NormSpec::regularized_p(double p, double eps, const Mat& shear) {
  const int n = static_cast<int>(shear.rows());
  check_dim_range(n);
  check_square(shear, n, "shear matrix");
  if (!(p >= 2.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidP, "p must be >= 2, got " + fmt_num(p));
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::InvalidArgument, "eps must be >= 0");
  Eigen::JacobiSVD<Mat> svd(shear);
  const auto& sv = svd.singularValues();
  if (!(sv(n - 1) > 1e-12 * sv(0))) throw Error(ErrorKind::InvalidArgument, "shear matrix must be invertible");
  return make(n, RegularizedPParams{p, eps, shear});
}

NormSpec NormSpec::regularized_p(double p, double eps, int dim) {
  check_dim_range(dim);
  return regularized_p(p, eps, Mat::Identity(dim, dim));
}

NormSpec NormSpec::shifted_ball(const Vec& center) {
  const int n = static_cast<int>(center.size());
  check_dim_range(n);
  if (!(center.norm() < 1.0)) throw Error(ErrorKind::InvalidArgument, "shifted ball center must have |c| < 1");
  return make(n, ShiftedBallParams{center});
}

NormSpec NormSpec::reversed(const NormSpec& inner) {
  return make(inner.dim(), ReversedParams{std::make_shared<const NormSpec>(inner)});
}

NormFamily NormSpec::family() const {
  return static_cast<NormFamily>(state_->params.index());
}

std::string NormSpec::describe() const {
  const auto& params = state_->params;
  auto vec_str = [](const Vec& v) {
    std::string s = "(";
    for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_num(v(i));
    return s + ")";
  };
  switch (params.index()) {
    case 0: {
      const Mat& A = std::get<QuadraticParams>(params).A;
      if ((A - Mat::Identity(dim(), dim())).norm() == 0.0) return "euclidean";
      return "quadratic";
    }
    case 1: {
      const auto& P = std::get<RegularizedPParams>(params);
      std::string s = "regularized_p(p=" + fmt_num(P.p) + ", eps=" + fmt_num(P.eps);
      if ((P.shear - Mat::Identity(dim(), dim())).norm() != 0.0) s += ", sheared";
      return s + ")";
    }
    case 2: return "shifted_ball(c=" + vec_str(std::get<ShiftedBallParams>(params).center) + ")";
    default: return "reversed(" + std::get<ReversedParams>(params).inner->describe() + ")";
  }
}

double NormSpec::value(const Vec& x) const {
  check_dim(*this, x);
  double v = 0.0;
  eval_all(*this, x, &v, nullptr, nullptr);
  return v;
}

Vec NormSpec::legendre(const Vec& x) const {
  check_dim(*this, x);
  Vec L;
  eval_all(*this, x, nullptr, &L, nullptr);
  return L;
}

Mat NormSpec::hessian(const Vec& x) const {
  check_dim(*this, x);
  Mat g;
  eval_all(*this, x, nullptr, nullptr, &g);
  return g;
}

void NormSpec::legendre_and_hessian(const Vec& x, Vec& L, Mat& g) const {
  check_dim(*this, x);
  eval_all(*this, x, nullptr, &L, &g);
}

Vec NormSpec::legendre_inverse(const Vec& w) const {
  check_dim(*this, w);
  const double wn = w.norm();
  if (wn == 0.0) return Vec::Zero(dim());
  // Homogeneous start: t * w_hat with L(t w_hat) . w_hat = t ||w_hat||^2 = 1.
  Vec wh = w / wn;
  double nv = value(wh);
  return legendre_inverse(w, wn * wh / (nv * nv));
}

Vec NormSpec::legendre_inverse(const Vec& w, const Vec& hint) const {
  check_dim(*this, w);
  const double wn = w.norm();
  if (wn == 0.0) return Vec::Zero(dim());
  if (hint.size() != w.size()) throw Error(ErrorKind::DimensionMismatch, "hint dimension");
  // Solve L(x) = w / |w| and rescale; L* is positively 1-homogeneous.
  const Vec target = w / wn;
  Vec x = hint / wn;
  if (!(x.norm() > 0.0) || !x.allFinite()) {
    double nv = value(target);
    x = target / (nv * nv);
  }
  const double tol = 1e-12 * (1.0 + wn) / wn;
  Vec L;
  Mat g;
  eval_all(*this, x, nullptr, &L, &g);
  Vec r = L - target;
  double rn = r.norm();
  // Once inside the tolerance, one extra full step polishes x when g is ill conditioned.
  int polish = 0;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    if (rn < tol && (polish++ > 0 || rn == 0.0)) return wn * x;
    Vec step = g.ldlt().solve(r);
    if (!step.allFinite()) step = g.completeOrthogonalDecomposition().solve(r);
    if (rn < tol && step.norm() <= 1e-16 * x.norm()) return wn * x;
    double alpha = 1.0;
    bool improved = false;
    for (int k = 0; k < 60; ++k) {
      Vec xn = x - alpha * step;
      Vec Ln;
      Mat gn;
      eval_all(*this, xn, nullptr, &Ln, &gn);
      Vec rnv = Ln - target;
      double rnn = rnv.norm();
      if (rnn < rn || (polish > 0 && alpha == 1.0 && rnn <= 2.0 * rn)) {
        x = xn;
        L = Ln;
        g = gn;
        r = rnv;
        rn = rnn;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  if (rn < tol) return wn * x;
  throw Error(ErrorKind::NewtonDivergence,
              "Legendre inverse did not converge (residual " + fmt_num(rn * wn) + ") for " + describe());
}

double norm_eval(const NormSpec& spec, const Vec& x) { return spec.value(x); }

MetricTensor metric_tensor(const NormSpec& spec, const Vec& x) {
  check_dim(spec, x);
  if (x.norm() == 0.0) throw Error(ErrorKind::ZeroVector, "metric tensor undefined at the origin");
  Mat g = spec.hessian(x);
  double lo = min_eig(g);
  if (!(lo >= kHessianFloor)) {
    throw Error(ErrorKind::DegenerateHessian, "metric tensor has eigenvalue " + fmt_num(lo));
  }
  return MetricTensor{x, g};
}

double inner_g(const NormSpec& spec, const Vec& x, const Vec& a, const Vec& b) {
  check_dim(spec, a);
  check_dim(spec, b);
  return a.dot(metric_tensor(spec, x).entries * b);
}

Vec legendre(const NormSpec& spec, const Vec& x) { return spec.legendre(x); }

Vec legendre_inverse(const NormSpec& spec, const Vec& w) { return spec.legendre_inverse(w); }

Vec gradient_vector(const NormSpec& spec, const Vec& df) { return spec.legendre_inverse(df); }

double dual_norm(const NormSpec& spec, const Vec& w) { return spec.value(spec.legendre_inverse(w)); }

UniformConstants uniform_constants(const NormSpec& spec, int angular_resolution) {
  if (angular_resolution < 16) throw Error(ErrorKind::InvalidArgument, "angular_resolution must be >= 16");
  const int n = spec.dim();
  // log(||y|| / g_x(y,y)^{1/2}); C maximizes it, S maximizes its negative.
  auto log_ratio = [&](const Vec& x, const Vec& y) {
    Mat g = metric_tensor(spec, x).entries;
    return std::log(spec.value(y)) - 0.5 * std::log(y.dot(g * y));
  };
  auto unpack = [&](const Eigen::VectorXd& q, Vec& x, Vec& y) {
    if (n == 2) {
      x = make_vec({std::cos(q(0)), std::sin(q(0))});
      y = make_vec({std::cos(q(1)), std::sin(q(1))});
    } else {
      x = q.head(n);
      y = q.tail(n);
    }
  };
  auto safe = [&](const Eigen::VectorXd& q, double sign) {
    Vec x, y;
    unpack(q, x, y);
    if (x.norm() < 1e-6 || y.norm() < 1e-6) return std::numeric_limits<double>::infinity();
    return -sign * log_ratio(x, y);
  };

  double best_c = -std::numeric_limits<double>::infinity();
  double best_s = -std::numeric_limits<double>::infinity();
  // Dyadic levels nest, so the estimate can only grow with the resolution.
  for (int count = 16; count <= angular_resolution; count *= 2) {
    std::vector<Vec> dirs;
    std::vector<Mat> gs;
    std::vector<double> norms;
    for (int i = 0; i < count; ++i) {
      dirs.push_back(sample_direction(n, i, count));
      gs.push_back(metric_tensor(spec, dirs.back()).entries);
      norms.push_back(spec.value(dirs.back()));
    }
    double lvl_c = -1e300, lvl_s = -1e300;
    int ci = 0, cj = 0, si = 0, sj = 0;
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < count; ++j) {
        double lr = std::log(norms[j]) - 0.5 * std::log(dirs[j].dot(gs[i] * dirs[j]));
        if (lr > lvl_c) { lvl_c = lr; ci = i; cj = j; }
        if (-lr > lvl_s) { lvl_s = -lr; si = i; sj = j; }
      }
    }
    auto refine = [&](int i, int j, double sign, double grid_val) {
      Eigen::VectorXd q0;
      double step;
      if (n == 2) {
        q0.resize(2);
        q0 << 2.0 * std::numbers::pi * i / count, 2.0 * std::numbers::pi * j / count;
        step = std::numbers::pi / count;
      } else {
        q0.resize(2 * n);
        q0 << dirs[i], dirs[j];
        step = 0.5 / std::sqrt(static_cast<double>(count));
      }
      Eigen::VectorXd q = nelder_mead([&](const Eigen::VectorXd& v) { return safe(v, sign); }, q0, step, 400);
      return std::max(grid_val, -safe(q, sign));
    };
    best_c = std::max(best_c, refine(ci, cj, 1.0, lvl_c));
    best_s = std::max(best_s, refine(si, sj, -1.0, lvl_s));
  }
  return UniformConstants{std::exp(best_c), std::exp(best_s), angular_resolution};
}

EllipticityBounds ellipticity_bounds(const NormSpec& spec, int samples) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be >= 1");
  return scan_bounds(spec, samples, true);
}

NormSpec reverse_norm(const NormSpec& spec) {
  if (spec.family() == NormFamily::Reversed) return *std::get<ReversedParams>(spec.params()).inner;
  return NormSpec::reversed(spec);
}

bool is_symmetric(const NormSpec& spec, int samples) {
  for (int i = 0; i < samples; ++i) {
    Vec x = sample_direction(spec.dim(), i, samples);
    Rng rng(split_seed(0xa11ceu, static_cast<std::uint64_t>(i)));
    if (i % 2 == 1) x = random_gaussian_vec(rng, spec.dim());
    double a = spec.value(x), b = spec.value(-x);
    if (std::abs(a - b) > 1e-12 * std::max(a, b)) return false;
  }
  return true;
}

}  // namespace minkflow
