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

#include "minkflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minkflow {

double TransportPlan::w2() const { return std::sqrt(std::max(0.0, cost)); }

namespace {

struct Support {
  std::vector<long> nodes;
  std::vector<Vec> points;
  std::vector<double> mass;
  double total = 0.0;
};

Support support_of(const GridDensity& d) {
  Support s;
  const double vol = d.grid.cell_volume();
  for (long i = 0; i < d.grid.size(); ++i) {
    if (d.values[i] > 0.0) {
      s.nodes.push_back(i);
      s.points.push_back(d.grid.node(i));
      s.mass.push_back(d.values[i] * vol);
      s.total += d.values[i] * vol;
    }
  }
  return s;
}

/// Row-major |S| x |T| matrix of ||y - x||^2.
std::vector<double> cost_matrix(const NormSpec& norm, const Support& a, const Support& b) {
  std::vector<double> C(a.nodes.size() * b.nodes.size());
  size_t k = 0;
  for (const Vec& x : a.points) {
    for (const Vec& y : b.points) {
      double d = norm.value(y - x);
      C[k++] = d * d;
    }
  }
  return C;
}

void check_inputs(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu) {
  if (mu.grid.dim != norm.dim() || nu.grid.dim != norm.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "density dimension differs from norm");
  }
}

/// Primal network simplex for the transportation problem. Nodes are sources, then
/// sinks, then an artificial root joined to every node by a big-M arc. The big-M part
/// of every potential is tracked symbolically as an integer multiple, so pricing is exact
/// in M. Pivots keep the spanning tree strongly feasible.
class NetworkSimplex {
 public:
  NetworkSimplex(const std::vector<double>& C, const std::vector<double>& a, const std::vector<double>& b)
      : C_(C), S_(static_cast<long>(a.size())), T_(static_cast<long>(b.size())) {
    N_ = S_ + T_ + 1;
    root_ = N_ - 1;
    supply_.resize(N_ - 1);
    for (long i = 0; i < S_; ++i) supply_[i] = a[i];
    for (long j = 0; j < T_; ++j) supply_[S_ + j] = -b[j];
    max_cost_ = 0.0;
    for (double c : C_) max_cost_ = std::max(max_cost_, c);
    tol_ = 1e-13 * std::max(max_cost_, 1e-300);
    basis_.resize(N_ - 1);
    flow_.resize(N_ - 1);
    for (long u = 0; u < N_ - 1; ++u) {
      basis_[u] = S_ * T_ + u;
      flow_[u] = std::abs(supply_[u]);
    }
    parent_.assign(N_, -1);
    pred_.assign(N_, -1);
    up_.assign(N_, 0);
    depth_.assign(N_, 0);
    pik_.assign(N_, 0);
    pir_.assign(N_, 0.0);
    rebuild();
  }

  long run() {
    const long arcs = S_ * T_;
    const long block = std::max<long>(static_cast<long>(std::sqrt(static_cast<double>(arcs))), 10);
    long next = 0;
    long pivots = 0;
    while (true) {
      long best = -1;
      int best_k = 0;
      double best_r = 0.0;
      long scanned = 0, in_block = 0;
      while (scanned < arcs) {
        long id = next;
        next = (next + 1 == arcs) ? 0 : next + 1;
        ++scanned;
        ++in_block;
        long i = id / T_, j = S_ + id % T_;
        int k = pik_[i] - pik_[j];
        double r = C_[id] + pir_[i] - pir_[j];
        if (k < 0 || (k == 0 && r < -tol_)) {
          if (best < 0 || k < best_k || (k == best_k && r < best_r)) {
            best = id;
            best_k = k;
            best_r = r;
          }
        }
        if (in_block >= block && best >= 0) break;
        if (in_block >= block) in_block = 0;
      }
      if (best < 0) break;
      pivot(best);
      ++pivots;
      if (pivots > 50 * arcs + 100000) {
        throw Error(ErrorKind::NonConvergence, "network simplex exceeded its pivot budget");
      }
    }
    return pivots;
  }

  double artificial_flow() const {
    double s = 0.0;
    for (long k = 0; k < N_ - 1; ++k) {
      if (basis_[k] >= S_ * T_) s += flow_[k];
    }
    return s;
  }

  template <typename F>
  void for_each_flow(F&& f) const {
    for (long k = 0; k < N_ - 1; ++k) {
      long id = basis_[k];
      if (id < S_ * T_ && flow_[k] > 0.0) f(id / T_, id % T_, flow_[k]);
    }
  }

 private:
  long arc_from(long id) const {
    if (id < S_ * T_) return id / T_;
    long u = id - S_ * T_;
    return supply_[u] >= 0.0 ? u : root_;
  }
  long arc_to(long id) const {
    if (id < S_ * T_) return S_ + id % T_;
    long u = id - S_ * T_;
    return supply_[u] >= 0.0 ? root_ : u;
  }

  /// Recomputes parent, depth and potentials from the basis by a BFS from the root.
  void rebuild() {
    adj_start_.assign(N_ + 1, 0);
    for (long k = 0; k < N_ - 1; ++k) {
      ++adj_start_[arc_from(basis_[k]) + 1];
      ++adj_start_[arc_to(basis_[k]) + 1];
    }
    for (long u = 0; u < N_; ++u) adj_start_[u + 1] += adj_start_[u];
    adj_.resize(2 * (N_ - 1));
    fill_.assign(adj_start_.begin(), adj_start_.end() - 1);
    for (long k = 0; k < N_ - 1; ++k) {
      adj_[fill_[arc_from(basis_[k])]++] = k;
      adj_[fill_[arc_to(basis_[k])]++] = k;
    }
    queue_.clear();
    queue_.push_back(root_);
    parent_[root_] = -1;
    depth_[root_] = 0;
    pik_[root_] = 0;
    pir_[root_] = 0.0;
    for (size_t h = 0; h < queue_.size(); ++h) {
      long u = queue_[h];
      for (long e = adj_start_[u]; e < adj_start_[u + 1]; ++e) {
        long k = adj_[e];
        if (k == pred_[u] && u != root_) continue;
        long id = basis_[k];
        long from = arc_from(id), to = arc_to(id);
        long w = (from == u) ? to : from;
        if (w == parent_[u]) continue;
        parent_[w] = u;
        pred_[w] = k;
        depth_[w] = depth_[u] + 1;
        bool artificial = id >= S_ * T_;
        int ck = artificial ? 1 : 0;
        double cr = artificial ? 0.0 : C_[id];
        if (to == w) {  // down arc: pi[w] = pi[u] + c
          up_[w] = 0;
          pik_[w] = pik_[u] + ck;
          pir_[w] = pir_[u] + cr;
        } else {  // up arc: pi[w] = pi[u] - c
          up_[w] = 1;
          pik_[w] = pik_[u] - ck;
          pir_[w] = pir_[u] - cr;
        }
        queue_.push_back(w);
      }
    }
  }

  void pivot(long in_arc) {
    const long u = arc_from(in_arc), v = arc_to(in_arc);
    long a = u, b = v;
    while (a != b) {
      if (depth_[a] > depth_[b]) {
        a = parent_[a];
      } else if (depth_[b] > depth_[a]) {
        b = parent_[b];
      } else {
        a = parent_[a];
        b = parent_[b];
      }
    }
    const long join = a;
    double delta = std::numeric_limits<double>::infinity();
    long leave = -1;
    for (long w = u; w != join; w = parent_[w]) {
      if (up_[w] && flow_[pred_[w]] < delta) {
        delta = flow_[pred_[w]];
        leave = pred_[w];
      }
    }
    for (long w = v; w != join; w = parent_[w]) {
      if (!up_[w] && flow_[pred_[w]] <= delta) {
        delta = flow_[pred_[w]];
        leave = pred_[w];
      }
    }
    if (leave < 0) throw Error(ErrorKind::NonConvergence, "unbounded transport cycle");
    for (long w = u; w != join; w = parent_[w]) {
      flow_[pred_[w]] += up_[w] ? -delta : delta;
    }
    for (long w = v; w != join; w = parent_[w]) {
      flow_[pred_[w]] += up_[w] ? delta : -delta;
    }
    basis_[leave] = in_arc;
    flow_[leave] = delta;
    for (long w = u; w != join; w = parent_[w]) {
      if (flow_[pred_[w]] < 0.0) flow_[pred_[w]] = 0.0;
    }
    for (long w = v; w != join; w = parent_[w]) {
      if (flow_[pred_[w]] < 0.0) flow_[pred_[w]] = 0.0;
    }
    pred_[root_] = -1;
    rebuild();
  }

  const std::vector<double>& C_;
  long S_, T_, N_, root_;
  std::vector<double> supply_;
  double max_cost_ = 0.0, tol_ = 0.0;
  std::vector<long> basis_;
  std::vector<double> flow_;
  std::vector<long> parent_, pred_, depth_;
  std::vector<std::uint8_t> up_;
  std::vector<int> pik_;
  std::vector<double> pir_;
  std::vector<long> adj_start_, adj_, fill_, queue_;
};

double plan_marginal_tv(const std::vector<PlanEntry>& entries, const Support& a, const Support& b,
                        const std::vector<long>& amap, const std::vector<long>& bmap) {
  std::vector<double> ra(a.mass.size(), 0.0), rb(b.mass.size(), 0.0);
  for (const auto& e : entries) {
    ra[amap[e.source]] += e.mass;
    rb[bmap[e.target]] += e.mass;
  }
  double tv = 0.0;
  for (size_t i = 0; i < ra.size(); ++i) tv += std::abs(ra[i] - a.mass[i]);
  for (size_t j = 0; j < rb.size(); ++j) tv += std::abs(rb[j] - b.mass[j]);
  return tv;
}

}  // namespace

double support_diameter_sq(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu) {
  check_inputs(norm, mu, nu);
  Support a = support_of(mu), b = support_of(nu);
  double m = 0.0;
  for (const Vec& x : a.points) {
    for (const Vec& y : b.points) m = std::max(m, std::pow(norm.value(y - x), 2));
  }
  return m;
}

TransportPlan w2_exact(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu) {
  check_inputs(norm, mu, nu);
  Support a = support_of(mu), b = support_of(nu);
  if (a.nodes.empty() || b.nodes.empty()) throw Error(ErrorKind::ZeroMass, "empty support");
  if (static_cast<long>(a.nodes.size()) > kMaxExactSupport || static_cast<long>(b.nodes.size()) > kMaxExactSupport) {
    throw Error(ErrorKind::SupportTooLarge, "exact transport supports " + std::to_string(a.nodes.size()) + " x " +
                                                std::to_string(b.nodes.size()) + " exceed " +
                                                std::to_string(kMaxExactSupport));
  }
  if (std::abs(a.total - b.total) > 1e-9 * std::max(a.total, b.total)) {
    throw Error(ErrorKind::InfeasibleMarginals, "source and target masses differ");
  }
  // Balance the totals exactly; the residual is below the normalization tolerance.
  std::vector<double> bm = b.mass;
  for (double& v : bm) v *= a.total / b.total;
  std::vector<double> C = cost_matrix(norm, a, b);
  NetworkSimplex ns(C, a.mass, bm);
  TransportPlan plan;
  plan.method = TransportMethod::Exact;
  plan.iterations = ns.run();
  const double art = ns.artificial_flow();
  if (art > 1e-9 * a.total) throw Error(ErrorKind::InfeasibleMarginals, "artificial arcs carry flow");
  const long T = static_cast<long>(b.nodes.size());
  ns.for_each_flow([&](long i, long j, double f) {
    plan.entries.push_back({a.nodes[i], b.nodes[j], f});
    plan.cost += f * C[i * T + j];
  });
  plan.primal_cost = plan.cost;
  std::vector<long> amap(mu.grid.size(), -1), bmap(nu.grid.size(), -1);
  for (size_t i = 0; i < a.nodes.size(); ++i) amap[a.nodes[i]] = static_cast<long>(i);
  for (size_t j = 0; j < b.nodes.size(); ++j) bmap[b.nodes[j]] = static_cast<long>(j);
  plan.marginal_err = plan_marginal_tv(plan.entries, a, b, amap, bmap);
  return plan;
}

namespace {

struct SinkhornResult {
  double dual = 0.0;    // <F, a> + <G, b>
  double primal = 0.0;  // <C, pi>
  double marginal_err = 0.0;
  long iterations = 0;
  std::vector<double> plan;  // row-major, only when requested
};

/// Stabilized Gibbs kernel exp((f_i + g_j - C_ij) / eps), stored row-sparse. Entries below
/// exp(-kDrop) are dropped; the scalings are kept within exp(+-kAbsorb) so the omitted
/// mass stays below exp(2 kAbsorb - kDrop) relative.
class SparseKernel {
 public:
  static constexpr double kAbsorb = 50.0;
  static constexpr double kDrop = 150.0;

  void build(const std::vector<double>& C, const std::vector<double>& f, const std::vector<double>& g, double eps) {
    const long S = static_cast<long>(f.size()), T = static_cast<long>(g.size());
    start_.assign(S + 1, 0);
    col_.clear();
    val_.clear();
    for (long i = 0; i < S; ++i) {
      const double* c = &C[i * T];
      for (long j = 0; j < T; ++j) {
        double e = (f[i] + g[j] - c[j]) / eps;
        if (e > -kDrop) {
          col_.push_back(static_cast<int>(j));
          val_.push_back(std::exp(e));
        }
      }
      start_[i + 1] = static_cast<long>(col_.size());
    }
  }
  /// out_i = sum_j K_ij x_j
  void apply(const std::vector<double>& x, std::vector<double>& out) const {
    for (size_t i = 0; i + 1 < start_.size(); ++i) {
      double s = 0.0;
      for (long e = start_[i]; e < start_[i + 1]; ++e) s += val_[e] * x[col_[e]];
      out[i] = s;
    }
  }
  /// out_j = sum_i K_ij x_i
  void apply_t(const std::vector<double>& x, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (size_t i = 0; i + 1 < start_.size(); ++i) {
      const double xi = x[i];
      for (long e = start_[i]; e < start_[i + 1]; ++e) out[col_[e]] += val_[e] * xi;
    }
  }
  template <typename F>
  void for_each(F&& fn) const {
    for (size_t i = 0; i + 1 < start_.size(); ++i) {
      for (long e = start_[i]; e < start_[i + 1]; ++e) fn(static_cast<long>(i), static_cast<long>(col_[e]), val_[e]);
    }
  }

 private:
  std::vector<long> start_;
  std::vector<int> col_;
  std::vector<double> val_;
};

bool scalings_ok(const std::vector<double>& s) {
  for (double x : s) {
    if (!(x > 0.0) || !std::isfinite(x) || std::abs(std::log(x)) > SparseKernel::kAbsorb) return false;
  }
  return true;
}

bool positive(const std::vector<double>& s) {
  for (double x : s) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  }
  return true;
}

bool is_symmetric(const std::vector<double>& C) {
  const long n = std::lround(std::sqrt(static_cast<double>(C.size())));
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < i; ++j) {
      if (std::abs(C[i * n + j] - C[j * n + i]) > 1e-12 * (C[i * n + j] + C[j * n + i])) return false;
    }
  }
  return true;
}

/// Log-stabilized Sinkhorn with eps-scaling: scalings u, v are folded into the duals f, g
/// whenever they leave exp(+-kAbsorb), and at every change of eps. With `symmetric`
/// (a = b, C symmetric) the averaged fixed-point update u <- sqrt(u / K(a u)) is used.
SinkhornResult sinkhorn_core(const std::vector<double>& C, const std::vector<double>& a, const std::vector<double>& b,
                             double eps_start, double eps_final, double tol, long max_iter, bool symmetric,
                             bool keep_plan) {
  const long S = static_cast<long>(a.size()), T = static_cast<long>(b.size());
  std::vector<double> f(S, 0.0), g(T, 0.0), u(S, 1.0), v(T, 1.0);
  std::vector<double> bv(T), au(S), Kbv(S), Kau(T);
  SparseKernel K;
  // Folds the finite part of the scalings into the duals.
  auto absorb_duals = [&](double eps) {
    for (long i = 0; i < S; ++i) {
      if (u[i] > 0.0 && std::isfinite(u[i])) f[i] += eps * std::log(u[i]);
    }
    for (long j = 0; j < T; ++j) {
      if (v[j] > 0.0 && std::isfinite(v[j])) g[j] += eps * std::log(v[j]);
    }
    std::fill(u.begin(), u.end(), 1.0);
    std::fill(v.begin(), v.end(), 1.0);
  };
  auto absorb = [&](double eps) {
    absorb_duals(eps);
    K.build(C, f, g, eps);
  };
  // Exact log-sum-exp updates of both potentials, for when the scaled kernel underflows.
  auto log_step = [&](double eps) {
    absorb_duals(eps);
    for (long i = 0; i < S; ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (long j = 0; j < T; ++j) m = std::max(m, std::log(b[j]) + (g[j] - C[i * T + j]) / eps);
      double s = 0.0;
      for (long j = 0; j < T; ++j) s += std::exp(std::log(b[j]) + (g[j] - C[i * T + j]) / eps - m);
      f[i] = -eps * (m + std::log(s));
    }
    for (long j = 0; j < T; ++j) {
      double m = -std::numeric_limits<double>::infinity();
      for (long i = 0; i < S; ++i) m = std::max(m, std::log(a[i]) + (f[i] - C[i * T + j]) / eps);
      double s = 0.0;
      for (long i = 0; i < S; ++i) s += std::exp(std::log(a[i]) + (f[i] - C[i * T + j]) / eps - m);
      g[j] = -eps * (m + std::log(s));
    }
    if (symmetric) {
      for (long i = 0; i < S; ++i) f[i] = g[i] = 0.5 * (f[i] + g[i]);
    }
    K.build(C, f, g, eps);
  };
  SinkhornResult res;
  double eps = std::max(eps_start, eps_final);
  K.build(C, f, g, eps);
  while (true) {
    const bool last = eps <= eps_final * (1.0 + 1e-12);
    const double stage_tol = last ? tol : std::max(tol, 1e-3);
    while (true) {
      if (++res.iterations > max_iter) {
        throw Error(ErrorKind::NonConvergence,
                    "Sinkhorn did not reach marginal tolerance at eps = " + std::to_string(eps));
      }
      // Row marginal of the current plan is a_i u_i (K (b v))_i.
      for (long j = 0; j < T; ++j) bv[j] = b[j] * v[j];
      K.apply(bv, Kbv);
      if (!positive(Kbv)) {
        log_step(eps);
        continue;
      }
      double err = 0.0;
      for (long i = 0; i < S; ++i) err += std::abs(a[i] * u[i] * Kbv[i] - a[i]);
      if (err < stage_tol && res.iterations > 1) break;
      if (symmetric) {
        for (long i = 0; i < S; ++i) u[i] = std::sqrt(u[i] / Kbv[i]);
        v = u;
      } else {
        for (long i = 0; i < S; ++i) u[i] = 1.0 / Kbv[i];
        for (long i = 0; i < S; ++i) au[i] = a[i] * u[i];
        K.apply_t(au, Kau);
        if (!positive(Kau)) {
          log_step(eps);
          continue;
        }
        for (long j = 0; j < T; ++j) v[j] = 1.0 / Kau[j];
      }
      if (!scalings_ok(u) || !scalings_ok(v)) absorb(eps);
    }
    absorb(eps);
    if (last) break;
    eps = std::max(eps * 0.5, eps_final);
    K.build(C, f, g, eps);
  }
  // After absorption pi_ij = a_i b_j K_ij.
  std::vector<double> row(S, 0.0), col(T, 0.0);
  if (keep_plan) res.plan.assign(C.size(), 0.0);
  K.for_each([&](long i, long j, double k) {
    double p = a[i] * b[j] * k;
    row[i] += p;
    col[j] += p;
    res.primal += p * C[i * T + j];
    if (keep_plan) res.plan[i * T + j] = p;
  });
  for (long i = 0; i < S; ++i) res.marginal_err += std::abs(row[i] - a[i]);
  for (long j = 0; j < T; ++j) res.marginal_err += std::abs(col[j] - b[j]);
  for (long i = 0; i < S; ++i) res.dual += f[i] * a[i];
  for (long j = 0; j < T; ++j) res.dual += g[j] * b[j];
  return res;
}

}  // namespace

TransportPlan w2_sinkhorn(const NormSpec& norm, const GridDensity& mu, const GridDensity& nu,
                          const SinkhornOptions& opts) {
  check_inputs(norm, mu, nu);
  Support a = support_of(mu), b = support_of(nu);
  if (a.nodes.empty() || b.nodes.empty()) throw Error(ErrorKind::ZeroMass, "empty support");
  std::vector<double> am = a.mass, bm = b.mass;
  for (double& x : am) x /= a.total;
  for (double& x : bm) x /= b.total;
  std::vector<double> C = cost_matrix(norm, a, b);
  double diam2 = 0.0;
  for (double c : C) diam2 = std::max(diam2, c);
  if (diam2 == 0.0) diam2 = 1.0;
  const double eps_final = opts.eps_final > 0.0 ? opts.eps_final : 1e-4 * diam2;
  const double eps_start = opts.eps_start > 0.0 ? opts.eps_start : diam2 / 8.0;
  if (eps_final < 1e-4 * diam2 * (1.0 - 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "final eps must be >= 1e-4 * diameter^2");
  }
  SinkhornResult ab = sinkhorn_core(C, am, bm, eps_start, eps_final, opts.tolerance, opts.max_iterations, false, true);
  TransportPlan plan;
  plan.method = TransportMethod::Sinkhorn;
  plan.eps_final = eps_final;
  plan.iterations = ab.iterations;
  plan.primal_cost = ab.primal;
  plan.marginal_err = ab.marginal_err;
  plan.cost = ab.primal;
  if (opts.debias) {
    std::vector<double> Caa = cost_matrix(norm, a, a), Cbb = cost_matrix(norm, b, b);
    SinkhornResult aa =
        sinkhorn_core(Caa, am, am, eps_start, eps_final, opts.tolerance, opts.max_iterations, is_symmetric(Caa), false);
    SinkhornResult bb =
        sinkhorn_core(Cbb, bm, bm, eps_start, eps_final, opts.tolerance, opts.max_iterations, is_symmetric(Cbb), false);
    plan.cost = ab.primal - 0.5 * (aa.primal + bb.primal);
    plan.iterations += aa.iterations + bb.iterations;
  }
  const long T = static_cast<long>(b.nodes.size());
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    for (long j = 0; j < T; ++j) {
      double p = ab.plan[i * T + j];
      if (p > 1e-300) plan.entries.push_back({a.nodes[i], b.nodes[j], p});
    }
  }
  return plan;
}

}  // namespace minkflow
