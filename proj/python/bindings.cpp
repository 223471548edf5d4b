#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neckpinch/barriers.hpp"
#include "neckpinch/collapse.hpp"
#include "neckpinch/config.hpp"
#include "neckpinch/diagnostics.hpp"
#include "neckpinch/errors.hpp"
#include "neckpinch/modulation.hpp"
#include "neckpinch/pde.hpp"
#include "neckpinch/runner.hpp"
#include "neckpinch/spectral.hpp"
#include "neckpinch/version.hpp"

namespace py = pybind11;
using namespace neckpinch;

namespace {

RadialProfile profile_from(const std::vector<double>& u, double half_width,
                           double stretch, int d, double t) {
  RadialProfile p;
  p.grid = Grid::half_line(half_width, static_cast<int>(u.size()), stretch);
  p.u = u;
  p.d = d;
  p.t = t;
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-curvature-flow neckpinch laboratory (C++ core)";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "NeckpinchError");

  py::class_<Grid>(m, "Grid")
      .def_static("half_line", &Grid::half_line, py::arg("half_width"),
                  py::arg("nodes"), py::arg("stretch"))
      .def_property_readonly("nodes", &Grid::nodes)
      .def("integrate_even",
           [](const Grid& g, const std::vector<double>& f) { return g.integrate_even(f); });

  py::class_<RadialProfile>(m, "RadialProfile")
      .def(py::init(&profile_from), py::arg("u"), py::arg("half_width"),
           py::arg("stretch") = 0.0, py::arg("d") = 2, py::arg("t") = 0.0)
      .def_readonly("u", &RadialProfile::u)
      .def_readonly("d", &RadialProfile::d)
      .def_readonly("t", &RadialProfile::t)
      .def_property_readonly("x", [](const RadialProfile& p) { return p.grid.nodes(); })
      .def("u_min", &RadialProfile::u_min);

  m.def("cylinder_exact", &cylinder_exact, py::arg("u0"), py::arg("d"), py::arg("t"));
  m.def("cylinder_pinch_time", &cylinder_pinch_time, py::arg("u0"), py::arg("d"));
  m.def("sphere_radius_exact", &sphere_radius_exact, py::arg("r0"), py::arg("d"),
        py::arg("t"));
  m.def("mcf_rhs", &mcf_rhs);
  m.def("curvature_norm", &curvature_norm);
  m.def("beta_ref", &beta_ref, py::arg("tau"), py::arg("b0"), py::arg("d"));
  m.def("lower_barrier", &lower_barrier, py::arg("y"), py::arg("b"), py::arg("d"));
  m.def("modulation_residuals", &modulation_residuals, py::arg("a"), py::arg("b"),
        py::arg("a_tau"), py::arg("b_tau"), py::arg("d"));

  m.def("almost_solution",
        [](double a, double b, int d, const std::vector<double>& y) {
          AlmostSolution V{a, b, d};
          std::vector<double> out(y.size());
          for (size_t i = 0; i < y.size(); ++i) out[i] = V(y[i]);
          return out;
        },
        py::arg("a"), py::arg("b"), py::arg("d"), py::arg("y"));

  m.def("weighted_inner",
        [](const Grid& g, const std::vector<double>& f, const std::vector<double>& h,
           double a) { return weighted_inner(g, f, h, a); });
  m.def("weighted_norm",
        [](const Grid& g, const std::vector<double>& f, double mm, int n) {
          return weighted_norm(g, f, mm, n);
        });

  py::class_<ModulationFit>(m, "ModulationFit")
      .def_readonly("a", &ModulationFit::a)
      .def_readonly("b", &ModulationFit::b)
      .def_readonly("phi", &ModulationFit::phi)
      .def_readonly("converged", &ModulationFit::converged)
      .def_readonly("newton_iters", &ModulationFit::newton_iters)
      .def_readonly("ortho_residual", &ModulationFit::ortho_residual);
  m.def("fit_parameters",
        [](const Grid& g, const std::vector<double>& v, int d, double a0, double b0) {
          return fit_parameters(g, v, d, a0, b0);
        },
        py::arg("grid"), py::arg("v"), py::arg("d"), py::arg("a0"), py::arg("b0"));

  m.def("hermite_spectrum",
        [](double alpha, double half_width, int nodes, int k) {
          auto line = spectral::UniformLine::make(half_width, nodes);
          spectral::OperatorParams p;
          p.alpha = alpha;
          auto op = spectral::assemble_operator(spectral::OperatorId::L_alpha_shifted, p, line);
          return spectral::discrete_spectrum(op, k);
        },
        py::arg("alpha"), py::arg("half_width") = 20.0, py::arg("nodes") = 3201,
        py::arg("k") = 5);

  m.def("run_physical",
        [](const std::string& config_text) {
          SimConfig cfg = parse_config(config_text);
          std::vector<double> center;
          Trajectory traj = run_physical(
              cfg, [&center](const RadialProfile& p, double) { center.push_back(p.u[0]); });
          py::dict out;
          std::vector<double> t, umin, maxa;
          for (const auto& s : traj.samples) {
            t.push_back(s.t);
            umin.push_back(s.u_min);
            maxa.push_back(s.max_a);
          }
          out["t"] = t;
          out["u_min"] = umin;
          out["max_abs_A"] = maxa;
          out["u_center"] = center;  // per accepted step, aligned with t[1:]
          if (traj.stop == StopReason::collapse_detected) {
            PinchEstimate pe = estimate_pinch_time(traj.samples);
            out["t_star"] = pe.t_star;
          }
          return out;
        },
        py::arg("config_text"));
}
