#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fqsl/caputo.hpp"
#include "fqsl/error.hpp"
#include "fqsl/sweep.hpp"

namespace py = pybind11;
using namespace fqsl;

namespace {

py::dict point_dict(const QslPoint& q) {
  py::dict d;
  d["tau"] = q.tau;
  d["sin2_bures"] = q.sin2_bures;
  d["lambda_tr"] = q.lambda_tr;
  d["lambda_hs"] = q.lambda_hs;
  d["lambda_op"] = q.lambda_op;
  d["ratio_op"] = q.ratio_op;
  d["ratio_max"] = q.ratio_max;
  return d;
}

py::list records(const std::vector<CurveRecord>& rec) {
  py::list out;
  for (const auto& r : rec) {
    py::dict d = point_dict(r.point);
    d["axis_value"] = r.axis_value;
    d["error"] = r.error;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fracqsl native core";
  m.attr("__version__") = FQSL_VERSION;

  py::register_exception<Error>(m, "FqslError", PyExc_ValueError);

  py::class_<EvalConfig>(m, "EvalConfig")
      .def(py::init<>())
      .def_readwrite("rel_tol", &EvalConfig::rel_tol)
      .def_readwrite("abs_tol", &EvalConfig::abs_tol)
      .def_readwrite("max_terms", &EvalConfig::max_terms)
      .def_readwrite("quad_points", &EvalConfig::quad_points)
      .def_readwrite("quad_cutoff", &EvalConfig::quad_cutoff);

  py::class_<JCParams>(m, "JCParams")
      .def(py::init([](double beta, double lambda, int n, double a, double b) {
             JCParams p;
             p.beta = beta;
             p.lambda = lambda;
             p.n = n;
             p.a = a;
             p.b = b;
             p.validate();
             return p;
           }),
           py::arg("beta") = 1.0, py::arg("lambda_") = 0.5, py::arg("n") = 20, py::arg("a") = std::sqrt(0.5),
           py::arg("b") = std::sqrt(0.5))
      .def_readwrite("beta", &JCParams::beta)
      .def_readwrite("lambda_", &JCParams::lambda)
      .def_readwrite("n", &JCParams::n)
      .def_readwrite("a", &JCParams::a)
      .def_readwrite("b", &JCParams::b)
      .def("coupling", &JCParams::coupling)
      .def("__repr__", [](const JCParams& p) {
        return "JCParams(beta=" + format_double(p.beta) + ", lambda_=" + format_double(p.lambda) +
               ", n=" + std::to_string(p.n) + ")";
      });

  py::class_<QslPoint>(m, "QslPoint")
      .def_readonly("tau", &QslPoint::tau)
      .def_readonly("sin2_bures", &QslPoint::sin2_bures)
      .def_readonly("lambda_tr", &QslPoint::lambda_tr)
      .def_readonly("lambda_hs", &QslPoint::lambda_hs)
      .def_readonly("lambda_op", &QslPoint::lambda_op)
      .def_readonly("ratio_op", &QslPoint::ratio_op)
      .def_readonly("ratio_max", &QslPoint::ratio_max)
      .def("as_dict", &point_dict);

  m.def(
      "ml",
      [](double beta, double gamma, cplx z, const EvalConfig& cfg) {
        return ml::ml_global(MLOrder{beta, gamma}, z, cfg);
      },
      py::arg("beta"), py::arg("gamma"), py::arg("z"), py::arg("cfg") = EvalConfig{},
      "E_{beta,gamma}(z)");
  m.def("ml_split", &ml::ml_split, py::arg("beta"), py::arg("alpha"), py::arg("t"), py::arg("cfg") = EvalConfig{},
        "E_beta(-alpha t^beta) from the integral representation");
  m.def("ml_time_derivative", &ml::ml_time_derivative, py::arg("beta"), py::arg("c"), py::arg("t"),
        py::arg("cfg") = EvalConfig{}, "d/dt E_beta(c t^beta)");

  m.def(
      "evolve",
      [](const JCParams& p, const std::vector<double>& times, const EvalConfig& cfg) {
        py::list out;
        for (double t : times) {
          if (t == 0.0) {
            out.append(py::make_tuple(t, 0.0, 1.0, py::none()));
            continue;
          }
          const auto s = diagonal_sample(p, t, cfg);
          out.append(py::make_tuple(t, s.rho_gg, s.rho_ee, s.drho_ee));
        }
        return out;
      },
      py::arg("params"), py::arg("times"), py::arg("cfg") = EvalConfig{},
      "List of (t, rho_gg, rho_ee, drho_ee).");

  m.def(
      "tfse_residual",
      [](const JCParams& p, double tau, int steps, const EvalConfig& cfg) {
        SampledState traj;
        traj.times = linspace(0.0, tau, steps + 1);
        for (double t : traj.times) {
          const auto amp = evolve(p, t, cfg);
          traj.values.push_back({amp.c_g, amp.c_e});
        }
        return tfse_residual(p.beta, interaction_hamiltonian(p.lambda, p.n, 0.0, 0.0), traj);
      },
      py::arg("params"), py::arg("tau") = 1.0, py::arg("steps") = 10000, py::arg("cfg") = EvalConfig{});

  m.def(
      "qsl",
      [](const JCParams& p, double tau, const EvalConfig& cfg) {
        py::gil_scoped_release release;
        return qsl_ml(make_trajectory(p, tau, {}, cfg), BoundRule::MaxOfThree, cfg);
      },
      py::arg("params"), py::arg("tau"), py::arg("cfg") = EvalConfig{});
  m.def("qsl_ratio_formula",
        [](const JCParams& p, double tau, const EvalConfig& cfg) { return qsl_ratio_formula(p, tau, cfg); },
        py::arg("params"), py::arg("tau"), py::arg("cfg") = EvalConfig{});

  m.def(
      "sweep",
      [](const std::string& axis, const std::vector<double>& grid, const JCParams& fixed, double tau, int threads) {
        SweepSpec s;
        s.axis = parse_axis(axis);
        s.grid = grid;
        s.fixed = fixed;
        s.tau = tau;
        s.threads = threads;
        std::vector<CurveRecord> rec;
        {
          py::gil_scoped_release release;
          rec = run_sweep(s);
        }
        return records(rec);
      },
      py::arg("axis"), py::arg("grid"), py::arg("fixed") = JCParams{}, py::arg("tau") = 1.0, py::arg("threads") = 1,
      "List of record dicts with the CSV field names.");

  m.def(
      "figure",
      [](const std::string& id, const std::string& out_dir, int threads) {
        auto specs = figure_preset(id);
        FigureOutput out;
        {
          py::gil_scoped_release release;
          const auto res = run_sweeps(specs, threads);
          out = write_figure(id, specs, res, out_dir);
        }
        return py::make_tuple(out.files, out.failed_points);
      },
      py::arg("id"), py::arg("out_dir"), py::arg("threads") = 1, "Returns (files, failed_points).");

  m.def(
      "detect_revivals",
      [](const std::vector<double>& values, double floor) {
        const auto r = detect_revivals(values, floor);
        return py::make_tuple(r.count, r.minima, r.first_rise);
      },
      py::arg("values"), py::arg("noise_floor") = 1e-6, "Returns (count, minima, first_rise).");
}
