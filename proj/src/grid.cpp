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

#include "minkflow/grid.hpp"

#include <algorithm>
#include <cmath>

#include "minkflow/quadrature.hpp"

namespace minkflow {

Grid Grid::make(const std::vector<double>& lo, const std::vector<double>& hi, const std::vector<int>& m) {
  const size_t n = lo.size();
  if (n < 1 || n > 3 || hi.size() != n || m.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "grid needs 1 to 3 axes with matching lo, hi, m");
  }
  Grid g;
  g.dim = static_cast<int>(n);
  for (size_t i = 0; i < n; ++i) {
    if (m[i] < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 cells per axis");
    if (!(hi[i] > lo[i])) throw Error(ErrorKind::InvalidArgument, "grid extent must be positive");
    g.lo[i] = lo[i];
    g.hi[i] = hi[i];
    g.m[i] = m[i];
  }
  return g;
}

Grid Grid::box(int dim, double half, int cells) {
  return make(std::vector<double>(dim, -half), std::vector<double>(dim, half), std::vector<int>(dim, cells));
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= h(i);
  return v;
}

long Grid::size() const {
  long s = 1;
  for (int i = 0; i < dim; ++i) s *= m[i];
  return s;
}

long Grid::stride(int axis) const {
  long s = 1;
  for (int i = dim - 1; i > axis; --i) s *= m[i];
  return s;
}

std::array<int, 3> Grid::multi_index(long index) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int i = dim - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(index % m[i]);
    index /= m[i];
  }
  return idx;
}

long Grid::flat_index(const std::array<int, 3>& idx) const {
  long f = 0;
  for (int i = 0; i < dim; ++i) f = f * m[i] + idx[i];
  return f;
}

Vec Grid::node(long index) const {
  auto idx = multi_index(index);
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x(i) = lo[i] + (idx[i] + 0.5) * h(i);
  return x;
}

bool Grid::on_boundary(long index) const {
  auto idx = multi_index(index);
  for (int i = 0; i < dim; ++i) {
    if (idx[i] == 0 || idx[i] == m[i] - 1) return true;
  }
  return false;
}

bool Grid::same_as(const Grid& o) const {
  if (dim != o.dim) return false;
  for (int i = 0; i < dim; ++i) {
    if (lo[i] != o.lo[i] || hi[i] != o.hi[i] || m[i] != o.m[i]) return false;
  }
  return true;
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

double GridDensity::boundary_mass() const {
  double s = 0.0;
  for (long i = 0; i < grid.size(); ++i) {
    if (grid.on_boundary(i)) s += values[i];
  }
  return s * grid.cell_volume();
}

double GridDensity::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

GridDensity make_density(const Grid& grid, const std::vector<double>& table) {
  if (static_cast<long>(table.size()) != grid.size()) {
    throw Error(ErrorKind::DimensionMismatch, "density table size differs from the grid");
  }
  GridDensity d{grid, table};
  double s = 0.0;
  for (double& v : d.values) {
    if (!(v > 0.0)) v = 0.0;
    s += v;
  }
  s *= grid.cell_volume();
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::ZeroMass, "density has no positive mass");
  for (double& v : d.values) v /= s;
  return d;
}

GridDensity make_density(const Grid& grid, const Profile& profile) {
  std::vector<double> t(grid.size());
  for (long i = 0; i < grid.size(); ++i) t[i] = profile(grid.node(i));
  return make_density(grid, t);
}

Profile gaussian_like_profile(const NormSpec& norm, const Vec& center, double a) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "gaussian width a must be > 0");
  return [norm, center, a](const Vec& x) {
    double r = norm.value(x - center);
    return std::exp(-r * r / (4.0 * a));
  };
}

Profile uniform_profile(const Vec& box_lo, const Vec& box_hi) {
  return [box_lo, box_hi](const Vec& x) {
    for (int i = 0; i < x.size(); ++i) {
      if (x(i) < box_lo(i) || x(i) > box_hi(i)) return 0.0;
    }
    return 1.0;
  };
}

Vec central_gradient(const GridDensity& rho, long index) {
  const Grid& g = rho.grid;
  auto idx = g.multi_index(index);
  Vec d(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    long s = g.stride(a);
    double up = idx[a] + 1 < g.m[a] ? rho.values[index + s] : rho.values[index];
    double dn = idx[a] > 0 ? rho.values[index - s] : rho.values[index];
    d(a) = (up - dn) / (2.0 * g.h(a));
  }
  return d;
}

double interpolate(const GridDensity& rho, const Vec& x) {
  const Grid& g = rho.grid;
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    double s = (x(a) - g.lo[a]) / g.h(a) - 0.5;
    if (s < 0.0 || s > g.m[a] - 1) return 0.0;
    int b = std::min(static_cast<int>(std::floor(s)), g.m[a] - 2);
    base[a] = b;
    frac[a] = s - b;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << g.dim); ++corner) {
    std::array<int, 3> idx = base;
    double w = 1.0;
    for (int a = 0; a < g.dim; ++a) {
      bool up = (corner >> a) & 1;
      idx[a] += up;
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    acc += w * rho.values[g.flat_index(idx)];
  }
  return acc;
}

double relative_l1(const GridDensity& a, const GridDensity& b) {
  if (!a.grid.same_as(b.grid)) throw Error(ErrorKind::DimensionMismatch, "relative_l1 needs identical grids");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    num += std::abs(a.values[i] - b.values[i]);
    den += std::abs(b.values[i]);
  }
  return num / den;
}

GridDensity coarsen(const GridDensity& rho, int factor) {
  const Grid& g = rho.grid;
  std::vector<int> m(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    if (g.m[a] % factor != 0) throw Error(ErrorKind::InvalidArgument, "coarsening factor must divide the grid");
    m[a] = g.m[a] / factor;
  }
  Grid c = Grid::make(std::vector<double>(g.lo.begin(), g.lo.begin() + g.dim),
                      std::vector<double>(g.hi.begin(), g.hi.begin() + g.dim), m);
  GridDensity out{c, std::vector<double>(c.size(), 0.0)};
  const double ratio = g.cell_volume() / c.cell_volume();
  for (long i = 0; i < g.size(); ++i) {
    auto idx = g.multi_index(i);
    for (int a = 0; a < g.dim; ++a) idx[a] /= factor;
    out.values[c.flat_index(idx)] += rho.values[i] * ratio;
  }
  return out;
}

Profile mollified_profile(const Profile& profile, int dim, double radius, int order) {
  if (!(radius > 0.0)) return profile;
  GaussRule g = gauss_legendre(order);
  struct Tap {
    Vec y;
    double w;
  };
  std::vector<Tap> taps;
  double total = 0.0;
  const int n1 = order;
  long count = 1;
  for (int a = 0; a < dim; ++a) count *= n1;
  for (long k = 0; k < count; ++k) {
    long r = k;
    Vec y(dim);
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      int i = static_cast<int>(r % n1);
      r /= n1;
      y(a) = radius * (2.0 * g.x[i] - 1.0);
      w *= g.w[i];
    }
    double s = y.squaredNorm() / (radius * radius);
    if (s >= 1.0) continue;
    double bump = std::exp(-1.0 / (1.0 - s));
    taps.push_back({y, w * bump});
    total += w * bump;
  }
  for (auto& t : taps) t.w /= total;
  return [profile, taps](const Vec& x) {
    double acc = 0.0;
    for (const auto& t : taps) acc += t.w * profile(x - t.y);
    return acc;
  };
}

}  // namespace minkflow
