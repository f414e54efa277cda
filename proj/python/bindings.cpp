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


#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "minkflow/entropy.hpp"
#include "minkflow/experiments.hpp"
#include "minkflow/flows.hpp"
#include "minkflow/heat.hpp"
#include "minkflow/io.hpp"
#include "minkflow/transport.hpp"
#include "minkflow/triangle.hpp"

namespace py = pybind11;
using namespace minkflow;

namespace {

py::array_t<double> values_array(const GridDensity& rho) {
  std::vector<py::ssize_t> shape;
  for (int a = 0; a < rho.grid.dim; ++a) shape.push_back(rho.grid.m[a]);
  py::array_t<double> out(shape);
  std::copy(rho.values.begin(), rho.values.end(), out.mutable_data());
  return out;
}

GridDensity density_from(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> v) {
  if (v.size() != g.size()) throw Error(ErrorKind::DimensionMismatch, "array size differs from the grid");
  return make_density(g, std::vector<double>(v.data(), v.data() + v.size()));
}

// Reports cross the boundary as JSON text; the Python side decodes them.
std::string report_text(const ReportRecord& r) { return r.to_json().dump(); }

}  // namespace

PYBIND11_MODULE(_minkflow, m) {
  py::register_exception<Error>(m, "MinkflowError", PyExc_RuntimeError);

  py::class_<NormSpec>(m, "Norm")
      .def_static("euclidean", &NormSpec::euclidean, py::arg("dim"))
      .def_static("quadratic", &NormSpec::quadratic, py::arg("A"))
      .def_static("regularized_p", py::overload_cast<double, double, int>(&NormSpec::regularized_p), py::arg("p"),
                  py::arg("eps"), py::arg("dim"))
      .def_static("regularized_p_sheared", py::overload_cast<double, double, const Mat&>(&NormSpec::regularized_p),
                  py::arg("p"), py::arg("eps"), py::arg("shear"))
      .def_static("shifted_ball", &NormSpec::shifted_ball, py::arg("center"))
      .def_static("reversed", &NormSpec::reversed, py::arg("inner"))
      .def_static("from_json", [](const std::string& text) { return load_norm(text); })
      .def("to_json", [](const NormSpec& n) { return norm_to_json(n).dump(); })
      .def_property_readonly("dim", &NormSpec::dim)
      .def("describe", &NormSpec::describe)
      .def("value", &NormSpec::value)
      .def("legendre", &NormSpec::legendre)
      .def("legendre_inverse", py::overload_cast<const Vec&>(&NormSpec::legendre_inverse, py::const_))
      .def("metric", [](const NormSpec& n, const Vec& x) { return metric_tensor(n, x).entries; })
      .def("__repr__", &NormSpec::describe);

  py::class_<PotentialSpec>(m, "Potential")
      .def_static("squared_reverse_norm", &PotentialSpec::squared_reverse_norm, py::arg("scale") = 1.0)
      .def_static("squared_distance", &PotentialSpec::squared_distance, py::arg("z"), py::arg("scale") = 1.0)
      .def_static("quadratic", &PotentialSpec::quadratic, py::arg("Q"), py::arg("center"), py::arg("scale") = 1.0)
      .def("describe", &PotentialSpec::describe);

  m.def("skew_quotient", &skew_quotient, py::arg("norm"), py::arg("potential"), py::arg("x"), py::arg("y"));
  m.def(
      "skew_estimate",
      [](const NormSpec& n, const PotentialSpec& p, int samples, double radius, std::uint64_t seed) {
        SkewReport r = skew_estimate(n, p, samples, radius, seed);
        return py::make_tuple(r.inf_quotient, r.argmin_pair.first, r.argmin_pair.second);
      },
      py::arg("norm"), py::arg("potential"), py::arg("samples") = 1024, py::arg("radius") = 2.0, py::arg("seed") = 0);
  m.def(
      "witness_search",
      [](const NormSpec& n, const PotentialSpec& p, double K) -> py::object {
        auto w = witness_search(n, p, K);
        if (!w) return py::none();
        return py::make_tuple(w->x, w->y, w->quotient);
      },
      py::arg("norm"), py::arg("potential"), py::arg("threshold_K"));
  m.def(
      "contraction_fit",
      [](const NormSpec& n, const PotentialSpec& p, int pairs, double t_end, double dt, std::uint64_t seed) {
        return contraction_fit(n, p, pairs, t_end, dt, seed);
      },
      py::arg("norm"), py::arg("potential"), py::arg("pairs") = 16, py::arg("t_end") = 1.0, py::arg("dt") = 1e-3,
      py::arg("seed") = 0);

  py::class_<Grid>(m, "Grid")
      .def_static("box", &Grid::box, py::arg("dim"), py::arg("half"), py::arg("cells"))
      .def_readonly("dim", &Grid::dim)
      .def("h", &Grid::h)
      .def("size", &Grid::size)
      .def("node", &Grid::node);

  m.def("gaussian_profile", [](const NormSpec& n, const Vec& z, double a, const Grid& g) {
    return values_array(gaussian_profile(n, z, a, g));
  });
  m.def("entropy", [](const Grid& g, py::array_t<double> v) { return relative_entropy(density_from(g, v)); });
  m.def("theta", [](const NormSpec& n, const Grid& g, py::array_t<double> v) {
    ThetaValue t = theta(n, density_from(g, v));
    return py::make_tuple(t.theta, t.numerator, t.second_moment);
  });
  m.def(
      "w2_squared",
      [](const NormSpec& n, const Grid& g, py::array_t<double> a, py::array_t<double> b, const std::string& method) {
        GridDensity mu = density_from(g, a), nu = density_from(g, b);
        if (method == "exact") return w2_exact(n, mu, nu).cost;
        if (method == "sinkhorn") return w2_sinkhorn(n, mu, nu).cost;
        throw Error(ErrorKind::InvalidArgument, "method must be exact or sinkhorn");
      },
      py::arg("norm"), py::arg("grid"), py::arg("mu"), py::arg("nu"), py::arg("method") = "exact");

  m.def("explicit_dt_limit", &explicit_dt_limit);
  m.def(
      "heat_solve",
      [](const NormSpec& n, const Grid& g, py::array_t<double> u0, double dt, double t_end, const std::string& scheme,
         int stride) {
        HeatScheme s = scheme == "implicit" ? HeatScheme::SemiImplicitFrozen : HeatScheme::ExplicitFlux;
        if (scheme != "implicit" && scheme != "explicit") {
          throw Error(ErrorKind::InvalidArgument, "scheme must be explicit or implicit");
        }
        DensityTrajectory tr = heat_solve(n, density_from(g, u0), HeatConfig{g, dt, t_end, s, stride});
        py::list frames;
        for (const auto& f : tr.frames) frames.append(values_array(f));
        py::dict out;
        out["times"] = tr.times;
        out["frames"] = frames;
        out["dt"] = tr.dt;
        out["max_step_drift"] = tr.max_step_drift;
        std::vector<double> ent;
        for (const auto& d : tr.diagnostics) ent.push_back(d.entropy);
        out["entropy"] = ent;
        return out;
      },
      py::arg("norm"), py::arg("grid"), py::arg("u0"), py::arg("dt"), py::arg("t_end"), py::arg("scheme") = "explicit",
      py::arg("stride") = 1);

  m.def("tangent_triangle_vector", &tangent_triangle_vector);
  m.def("step0_closed_form", &step0_closed_form);

  m.def("_step0_report", [](double p, const std::vector<double>& R, double eps) {
    return report_text(step0_report(p, R, eps));
  });
  m.def("_triangle_search_report", [](const NormSpec& n, int grid, bool refine) {
    return report_text(triangle_search_report(n, grid, refine));
  });
  m.def("_run_config", [](const std::string& path) { return report_text(run_config(path)); });
}
