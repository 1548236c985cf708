// Python bindings for the core operations: metric families, geodesic flow,
// the min-max pipeline, and the asymptotic audits.  Curves cross the boundary
// as lists of (r, phi) pairs in global polar coordinates.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "acgeo/asymptotics.hpp"
#include "acgeo/minmax.hpp"

namespace py = pybind11;
using namespace acgeo;

namespace {

std::vector<std::pair<double, double>> nodes_polar(const DiscreteCurve& c) {
  std::vector<std::pair<double, double>> out;
  out.reserve(c.nodes.size());
  for (const ChartPoint& p : c.nodes) {
    if (p.is_polar())
      out.emplace_back(p.x1, p.x2);
    else
      out.emplace_back(std::hypot(p.x1, p.x2), std::atan2(p.x2, p.x1));
  }
  return out;
}

DiscreteCurve curve_of(const std::vector<std::pair<double, double>>& nodes) {
  DiscreteCurve c;
  c.nodes.reserve(nodes.size());
  for (auto& [r, phi] : nodes) c.nodes.push_back(ChartPoint::polar(r, phi));
  if (!c.valid()) throw config_error("curve needs at least two nodes");
  return c;
}

struct PyGeodesic {
  double length = 0.0, energy = 0.0, grad_norm = 0.0;
  bool converged = false, embedded = false;
  int iters = 0, index = -1;
  std::vector<std::pair<double, double>> nodes;
};

struct PyMinMax {
  double lambda = 0.0, ratio = 0.0, e1 = 0.0, e2 = 0.0;
  double gap_margin = 0.0;
  bool gap = false;
  std::vector<int> indices;       // gamma1, gamma2, gamma3
  std::vector<double> lengths;    // same order
  double separation = 0.0;        // between the two minimizers
  std::vector<std::pair<int, double>> trace;  // (round, lambda)
  std::vector<std::pair<double, double>> gamma1, gamma2, gamma3;
};

PyGeodesic py_geodesic(const SurfaceMetric& m, double r_a, double phi_a,
                       double r_b, double phi_b, int N) {
  DiscreteCurve init;
  init.nodes.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    double t = (double)i / N;
    init.nodes.push_back(
        ChartPoint::polar(r_a + t * (r_b - r_a), phi_a + t * (phi_b - phi_a)));
  }
  GeodesicReport rep = find_geodesic(m, init);
  PyGeodesic out;
  out.length = rep.length;
  out.energy = rep.energy;
  out.grad_norm = rep.grad_norm;
  out.converged = rep.converged;
  out.iters = rep.iters;
  if (rep.converged) {
    out.index = morse_index(m, rep.curve);
    out.embedded = is_embedded(m, rep.curve).embedded;
  }
  out.nodes = nodes_polar(rep.curve);
  return out;
}

PyMinMax py_minmax(const SurfaceMetric& m, double r0, double phi0, int N,
                   int M, int rounds, int workers) {
  MinMaxConfig mc;
  mc.r0 = r0;
  mc.phi0 = phi0;
  mc.N = N;
  mc.M = M;
  mc.rounds = rounds;
  mc.workers = workers;
  PipelineResult res = run_minmax_pipeline(m, mc);
  PyMinMax out;
  out.lambda = res.minmax.lambda;
  out.ratio = res.minmax.ratio;
  out.e1 = res.minmax.e1;
  out.e2 = res.minmax.e2;
  out.gap_margin = res.minmax.gap_margin;
  out.gap = res.minmax.gap;
  out.indices = {res.minimizers.index_upper, res.minimizers.index_lower,
                 res.minmax.index_gamma3};
  out.lengths = {res.minimizers.upper.length, res.minimizers.lower.length,
                 res.minmax.gamma3.length};
  out.separation = res.minimizers.separation;
  for (const LambdaTracePoint& p : res.minmax.trace)
    out.trace.emplace_back(p.round, p.lambda);
  out.gamma1 = nodes_polar(res.minimizers.upper.curve);
  out.gamma2 = nodes_polar(res.minimizers.lower.curve);
  out.gamma3 = nodes_polar(res.minmax.gamma3.curve);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "min-max embedded geodesics on asymptotically conical surfaces: metric "
      "families, energy flow, sweepout widths, and asymptotic audits";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const config_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });
  // the run-time failure taxonomy (regime, chart, convergence, collapse,
  // coincidence) arrives as RuntimeError subclasses of std::runtime_error,
  // which pybind11 already maps; config errors become ValueError above.

  py::class_<SurfaceMetric>(mod, "SurfaceMetric")
      .def_static("cone", &SurfaceMetric::cone, py::arg("alpha"))
      .def_static("flat", &SurfaceMetric::flat)
      .def_static("profile", &SurfaceMetric::profile, py::arg("alpha"),
                  py::arg("a"), py::arg("r_patch") = 0.0)
      .def_static(
          "perturbed",
          [](double alpha, double mu, std::array<double, 3> amp) {
            return SurfaceMetric::perturbed(alpha, mu, amp);
          },
          py::arg("alpha"), py::arg("mu"), py::arg("amplitudes"))
      .def_property_readonly("alpha", &SurfaceMetric::alpha)
      .def_property_readonly("rotational", &SurfaceMetric::rotational)
      .def_property_readonly("mass", [](const SurfaceMetric& m) {
        return mass_formula(m);
      });

  py::class_<PyGeodesic>(mod, "Geodesic")
      .def_readonly("length", &PyGeodesic::length)
      .def_readonly("energy", &PyGeodesic::energy)
      .def_readonly("grad_norm", &PyGeodesic::grad_norm)
      .def_readonly("converged", &PyGeodesic::converged)
      .def_readonly("embedded", &PyGeodesic::embedded)
      .def_readonly("iters", &PyGeodesic::iters)
      .def_readonly("index", &PyGeodesic::index)
      .def_readonly("nodes", &PyGeodesic::nodes);

  py::class_<PyMinMax>(mod, "MinMax")
      .def_readonly("lambda_", &PyMinMax::lambda)
      .def_readonly("ratio", &PyMinMax::ratio)
      .def_readonly("e1", &PyMinMax::e1)
      .def_readonly("e2", &PyMinMax::e2)
      .def_readonly("gap_margin", &PyMinMax::gap_margin)
      .def_readonly("gap", &PyMinMax::gap)
      .def_readonly("indices", &PyMinMax::indices)
      .def_readonly("lengths", &PyMinMax::lengths)
      .def_readonly("separation", &PyMinMax::separation)
      .def_readonly("trace", &PyMinMax::trace)
      .def_readonly("gamma1", &PyMinMax::gamma1)
      .def_readonly("gamma2", &PyMinMax::gamma2)
      .def_readonly("gamma3", &PyMinMax::gamma3);

  mod.def("geodesic", &py_geodesic, py::arg("metric"), py::arg("r_a"),
          py::arg("phi_a"), py::arg("r_b"), py::arg("phi_b"),
          py::arg("n") = 256,
          "flow the polar chord between two points to a geodesic");
  mod.def("minmax", &py_minmax, py::arg("metric"), py::arg("r0"),
          py::arg("phi0") = 0.0, py::arg("n") = 128, py::arg("m") = 16,
          py::arg("rounds") = 12, py::arg("workers") = 1,
          "run the full sweepout min-max pipeline between the antipodal "
          "points at radius r0");

  mod.def(
      "energy",
      [](const SurfaceMetric& m,
         const std::vector<std::pair<double, double>>& nodes) {
        return energy(m, curve_of(nodes));
      },
      py::arg("metric"), py::arg("nodes"));
  mod.def(
      "length",
      [](const SurfaceMetric& m,
         const std::vector<std::pair<double, double>>& nodes) {
        return length(m, curve_of(nodes));
      },
      py::arg("metric"), py::arg("nodes"));

  mod.def(
      "cone_distance",
      [](double r1, double phi1, double r2, double phi2, double alpha) {
        return cone_distance(ChartPoint::polar(r1, phi1),
                             ChartPoint::polar(r2, phi2), alpha);
      },
      py::arg("r1"), py::arg("phi1"), py::arg("r2"), py::arg("phi2"),
      py::arg("alpha"), "exact geodesic distance on the cone of angle alpha");

  mod.def("mass_formula", &mass_formula, py::arg("metric"),
          "total curvature deficit 2 pi (1 - sin alpha)");
  mod.def("mass_measured", &mass_measured, py::arg("metric"), py::arg("r0"),
          py::arg("nphi") = 512,
          "mass read off the circle of radius r0 via its total turning");
  mod.def(
      "gauss_bonnet_disk",
      [](const SurfaceMetric& m, double r0, int nr, int nphi) {
        GaussBonnetReport rep = gauss_bonnet_disk(m, r0, nr, nphi);
        py::dict d;
        d["curvature_integral"] = rep.curvature_integral;
        d["boundary_integral"] = rep.boundary_integral;
        d["total"] = rep.total;
        d["expected"] = rep.expected;
        d["defect"] = rep.defect;
        return d;
      },
      py::arg("metric"), py::arg("r0"), py::arg("nr") = 256,
      py::arg("nphi") = 256,
      "Gauss-Bonnet audit of the disk of radius r0 (rotational families)");
}
