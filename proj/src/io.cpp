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


#include "minkflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace minkflow {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path);
  return out;
}

double number(const Json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) bad(std::string("'") + key + "' must be a number");
  return doc[key].get<double>();
}

}  // namespace

Json load_json(const std::string& path_or_inline) {
  std::string text;
  if (!path_or_inline.empty() && path_or_inline.front() == '{') {
    text = path_or_inline;
  } else {
    std::ifstream in(path_or_inline);
    if (!in) bad("cannot read " + path_or_inline);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad("malformed JSON in " + path_or_inline + ": " + e.what());
  }
}

void save_json(const Json& doc, const std::string& path) {
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

Vec vec_from_json(const Json& doc, const std::string& what) {
  if (!doc.is_array() || doc.empty() || doc.size() > static_cast<size_t>(kMaxDim)) {
    bad(what + " must be a list of 1 to " + std::to_string(kMaxDim) + " numbers");
  }
  Vec v(static_cast<Eigen::Index>(doc.size()));
  for (size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) bad(what + " must contain numbers");
    v(static_cast<Eigen::Index>(i)) = doc[i].get<double>();
  }
  return v;
}

Mat mat_from_json(const Json& doc, int n, const std::string& what) {
  Json flat = Json::array();
  if (doc.is_array() && !doc.empty() && doc[0].is_array()) {
    for (const auto& row : doc) {
      for (const auto& x : row) flat.push_back(x);
    }
  } else {
    flat = doc;
  }
  if (!flat.is_array() || flat.size() != static_cast<size_t>(n * n)) {
    bad(what + " must hold " + std::to_string(n * n) + " entries (row-major)");
  }
  Mat A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!flat[i * n + j].is_number()) bad(what + " must contain numbers");
      A(i, j) = flat[i * n + j].get<double>();
    }
  }
  return A;
}

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

namespace {

Json mat_to_json(const Mat& A) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) a.push_back(A(i, j));
  }
  return a;
}

}  // namespace

NormSpec norm_from_json(const Json& doc) {
  if (!doc.is_object()) bad("norm spec must be an object");
  if (!doc.contains("family") || !doc["family"].is_string()) bad("norm spec needs a 'family' string");
  const std::string family = doc["family"].get<std::string>();
  const Json params = doc.contains("params") ? doc["params"] : Json::object();
  int dim = 0;
  if (doc.contains("dim")) {
    if (!doc["dim"].is_number_integer()) bad("'dim' must be an integer");
    dim = doc["dim"].get<int>();
  }
  auto need_dim = [&] {
    if (dim < 1 || dim > kMaxDim) bad("norm spec needs 'dim' between 1 and " + std::to_string(kMaxDim));
  };
  try {
    if (family == "euclidean") {
      need_dim();
      return NormSpec::euclidean(dim);
    }
    if (family == "quadratic") {
      need_dim();
      if (!params.contains("matrix")) return NormSpec::euclidean(dim);
      return NormSpec::quadratic(mat_from_json(params["matrix"], dim, "params.matrix"));
    }
    if (family == "regularized_p") {
      need_dim();
      double p = number(params, "p", 4.0), eps = number(params, "eps", 0.0);
      if (params.contains("shear")) return NormSpec::regularized_p(p, eps, mat_from_json(params["shear"], dim, "params.shear"));
      return NormSpec::regularized_p(p, eps, dim);
    }
    if (family == "shifted_ball") {
      if (!params.contains("center")) bad("shifted_ball needs params.center");
      Vec c = vec_from_json(params["center"], "params.center");
      if (dim != 0 && c.size() != dim) bad("params.center length differs from dim");
      return NormSpec::shifted_ball(c);
    }
    if (family == "reversed") {
      if (!params.contains("inner")) bad("reversed needs params.inner");
      NormSpec inner = norm_from_json(params["inner"]);
      if (dim != 0 && inner.dim() != dim) bad("inner norm dimension differs from dim");
      return NormSpec::reversed(inner);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    bad(std::string("invalid norm parameters: ") + e.what());
  }
  bad("unknown norm family '" + family + "'");
}

Json norm_to_json(const NormSpec& norm) {
  Json doc;
  doc["dim"] = norm.dim();
  Json params = Json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, QuadraticParams>) {
          doc["family"] = "quadratic";
          params["matrix"] = mat_to_json(p.A);
        } else if constexpr (std::is_same_v<T, RegularizedPParams>) {
          doc["family"] = "regularized_p";
          params["p"] = p.p;
          params["eps"] = p.eps;
          params["shear"] = mat_to_json(p.shear);
        } else if constexpr (std::is_same_v<T, ShiftedBallParams>) {
          doc["family"] = "shifted_ball";
          params["center"] = vec_to_json(p.center);
        } else {
          doc["family"] = "reversed";
          params["inner"] = norm_to_json(*p.inner);
        }
      },
      norm.params());
  // Keep "family" first for readability.
  Json out;
  out["family"] = doc["family"];
  out["dim"] = doc["dim"];
  out["params"] = params;
  return out;
}

NormSpec load_norm(const std::string& path_or_inline) { return norm_from_json(load_json(path_or_inline)); }

PotentialSpec potential_from_json(const Json& doc, int dim) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) bad("potential needs a 'kind' string");
  const std::string kind = doc["kind"].get<std::string>();
  const double scale = number(doc, "scale", 1.0);
  if (kind == "squared_reverse_norm") return PotentialSpec::squared_reverse_norm(scale);
  if (kind == "squared_distance") {
    Vec z = doc.contains("z") ? vec_from_json(doc["z"], "z") : Vec(Vec::Zero(dim));
    if (z.size() != dim) bad("potential 'z' length differs from the norm dimension");
    return PotentialSpec::squared_distance(z, scale);
  }
  if (kind == "quadratic") {
    if (!doc.contains("Q")) bad("quadratic potential needs 'Q'");
    Mat Q = mat_from_json(doc["Q"], dim, "Q");
    Vec c = doc.contains("center") ? vec_from_json(doc["center"], "center") : Vec(Vec::Zero(dim));
    if (c.size() != dim) bad("potential 'center' length differs from the norm dimension");
    return PotentialSpec::quadratic(Q, c, scale);
  }
  bad("unknown potential kind '" + kind + "'");
}

PotentialSpec load_potential(const std::string& path_or_inline, int dim) {
  return potential_from_json(load_json(path_or_inline), dim);
}

Grid grid_from_json(const Json& doc) {
  if (!doc.is_object()) bad("grid spec must be an object");
  for (const char* k : {"lo", "hi", "m"}) {
    if (!doc.contains(k) || !doc[k].is_array()) bad(std::string("grid spec needs a '") + k + "' list");
  }
  std::vector<double> lo, hi;
  std::vector<int> m;
  try {
    lo = doc["lo"].get<std::vector<double>>();
    hi = doc["hi"].get<std::vector<double>>();
    m = doc["m"].get<std::vector<int>>();
  } catch (const nlohmann::json::exception&) {
    bad("grid lo/hi must be numbers and m integers");
  }
  if (doc.contains("dim") && doc["dim"].get<size_t>() != lo.size()) bad("grid 'dim' differs from the list lengths");
  try {
    return Grid::make(lo, hi, m);
  } catch (const Error& e) {
    bad(e.what());
  }
}

Json grid_to_json(const Grid& grid) {
  Json doc;
  doc["dim"] = grid.dim;
  doc["lo"] = std::vector<double>(grid.lo.begin(), grid.lo.begin() + grid.dim);
  doc["hi"] = std::vector<double>(grid.hi.begin(), grid.hi.begin() + grid.dim);
  doc["m"] = std::vector<int>(grid.m.begin(), grid.m.begin() + grid.dim);
  return doc;
}

void write_density(const GridDensity& rho, const std::string& path) {
  fs::path csv = fs::path(path).replace_extension(".csv");
  Json doc = grid_to_json(rho.grid);
  doc["values"] = csv.filename().string();
  save_json(doc, path);
  auto out = open_out(csv.string());
  out << "rho\n";
  for (double v : rho.values) out << g17(v) << "\n";
}

GridDensity read_density(const std::string& path) {
  Json doc = load_json(path);
  Grid g = grid_from_json(doc);
  fs::path csv = doc.contains("values") && doc["values"].is_string()
                     ? fs::path(path).parent_path() / doc["values"].get<std::string>()
                     : fs::path(path).replace_extension(".csv");
  std::ifstream in(csv);
  if (!in) bad("cannot read density values " + csv.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("rho", 0) != 0) bad(csv.string() + " must start with the header 'rho'");
  std::vector<double> values;
  values.reserve(g.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      values.push_back(std::stod(line));
    } catch (const std::exception&) {
      bad("bad value '" + line + "' in " + csv.string());
    }
  }
  if (static_cast<long>(values.size()) != g.size()) {
    bad(csv.string() + " holds " + std::to_string(values.size()) + " values, grid needs " + std::to_string(g.size()));
  }
  try {
    return make_density(g, values);
  } catch (const Error& e) {
    bad(e.what());
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  auto out = open_out(path);
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x" << i;
  out << "\n";
  for (size_t k = 0; k < traj.times.size(); ++k) {
    out << g17(traj.times[k]);
    for (int i = 0; i < n; ++i) out << "," << g17(traj.states[k](i));
    out << "\n";
  }
}

void write_series_csv(const DensityTrajectory& traj, const std::string& path) {
  auto out = open_out(path);
  out << "t,mass,entropy,m2_fwd,m2_bwd,dissipation\n";
  for (const auto& d : traj.diagnostics) {
    out << g17(d.t) << "," << g17(d.mass) << "," << g17(d.entropy) << "," << g17(d.m2_fwd) << "," << g17(d.m2_bwd)
        << "," << g17(d.dissipation) << "\n";
  }
}

std::string svg_line_chart(const std::vector<double>& x, const std::vector<Series>& series, const std::string& xlabel,
                           const std::string& ylabel) {
  const double W = 640, H = 400, L = 80, R = 20, T = 20, B = 60;
  double x0 = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
  double x1 = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
  double y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) {
    double pad = std::max(1e-12, std::abs(y0) * 1e-3);
    y0 -= pad;
    y1 += pad;
  }
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << g6(xv) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << g6(yv) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  o << "<text x=\"15\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % 5];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (size_t k = 0; k < x.size() && k < series[s].y.size(); ++k) {
      if (std::isfinite(series[s].y[k])) o << px(x[k]) << "," << py(series[s].y[k]) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (s + 1) << "\" text-anchor=\"end\" fill=\"" << col << "\">"
      << series[s].name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace minkflow
