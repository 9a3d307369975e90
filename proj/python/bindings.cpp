#include <pybind11/pybind11.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include "comonotone/barrier.hpp"
#include "comonotone/comonotony_lab.hpp"
#include "comonotone/experiment.hpp"
#include "comonotone/gaussian.hpp"
#include "comonotone/peacock_lab.hpp"
#include "comonotone/process.hpp"

namespace py = pybind11;
using namespace comonotone;

namespace {

RunOptions run_options(std::size_t n_paths, std::uint64_t seed, unsigned workers, double z) {
  RunOptions o;
  o.n_paths = n_paths;
  o.seed = seed;
  o.workers = workers;
  o.z = z;
  return o;
}

py::dict report_dict(const CovTestReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["cov"] = r.cov_estimate;
  d["stderr"] = r.std_error;
  d["n"] = r.n_paths;
  d["predicted"] = to_string(r.predicted);
  d["verdict"] = to_string(r.verdict);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monte Carlo checks of co-monotony, peacocks and barrier bounds";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<double, std::size_t>(), py::arg("horizon"), py::arg("n_steps"))
      .def_property_readonly("horizon", &TimeGrid::horizon)
      .def_property_readonly("n_steps", &TimeGrid::n_steps)
      .def("points", &TimeGrid::points);

  py::class_<Path>(m, "Path")
      .def(py::init([](const TimeGrid& g, std::vector<double> v, bool cadlag) {
             return Path(g, std::move(v), cadlag ? Interpretation::Cadlag : Interpretation::Continuous);
           }),
           py::arg("grid"), py::arg("values"), py::arg("cadlag") = false)
      .def_property_readonly("grid", &Path::grid)
      .def_property_readonly("values",
                             [](const Path& p) { return std::vector<double>(p.values().begin(), p.values().end()); })
      .def("at", &Path::at)
      .def("__len__", &Path::size);

  m.def("linear_interpolate", &linear_interpolate, py::arg("path"), py::arg("t"));
  m.def("stepwise_approximation", &stepwise_approximation, py::arg("path"), py::arg("m"));
  m.def("pointwise_leq", &pointwise_leq);
  m.def("splitmix64", &splitmix64);

  py::class_<Process>(m, "Process")
      .def_property_readonly("name", &Process::name)
      .def_property_readonly("grid", &Process::grid)
      .def("sample", [](const Process& p, std::uint64_t seed, std::uint64_t index) {
        RngStream rng(seed, index);
        return p.sample(rng);
      }, py::arg("seed"), py::arg("index") = 0);

  m.def("brownian_motion", &make_bm, py::arg("grid"));
  m.def("bm_series", &make_bm_series, py::arg("grid"), py::arg("n_terms"));
  m.def("brownian_bridge", &make_bridge, py::arg("grid"));
  m.def("fbm", [](const TimeGrid& g, double h) { return make_fbm_cholesky(g, h); }, py::arg("grid"), py::arg("hurst"));
  m.def("gbm", [](const TimeGrid& g, double s0, double rate, double vol) {
    GBMSpec s{s0, rate, vol};
    s.validate();
    return make_gbm(s, g);
  }, py::arg("grid"), py::arg("s0") = 1.0, py::arg("rate") = 0.0, py::arg("vol") = 0.2);
  m.def("liouville_power", [](const TimeGrid& g, double exponent, std::size_t substeps) {
    return make_liouville(g, [exponent](double u) { return std::pow(u, exponent); }, substeps);
  }, py::arg("grid"), py::arg("exponent"), py::arg("substeps") = 1);

  m.def("fbm_covariance", &fbm_covariance, py::arg("s"), py::arg("t"), py::arg("hurst"));
  m.def("bridge_covariance", &bridge_covariance, py::arg("s"), py::arg("t"), py::arg("horizon"));
  m.def("bm_series_covariance", &bm_series_covariance, py::arg("s"), py::arg("t"), py::arg("horizon"),
        py::arg("n_terms"));
  m.def("liouville_covariance", &liouville_covariance, py::arg("kernel"), py::arg("s"), py::arg("t"));

  py::class_<MonotoneFunctional>(m, "Functional")
      .def_property_readonly("description", [](const MonotoneFunctional& f) { return f.description; })
      .def_property_readonly("monotonicity", [](const MonotoneFunctional& f) { return to_string(f.monotonicity); })
      .def("__call__", &MonotoneFunctional::operator());
  m.def("terminal", &terminal);
  m.def("running_max", &running_max);
  m.def("running_min", &running_min);
  m.def("coordinate", &coordinate);
  m.def("call_payoff", &call_payoff, py::arg("strike"));

  m.def("estimate_cov",
        [](const Process& p, const MonotoneFunctional& f, const MonotoneFunctional& g, std::size_t n_paths,
           std::uint64_t seed, unsigned workers, double z) {
          return report_dict(estimate_cov(p, f, g, run_options(n_paths, seed, workers, z)));
        },
        py::arg("process"), py::arg("f"), py::arg("g"), py::arg("n_paths") = 100000, py::arg("seed") = 0,
        py::arg("workers") = 0, py::arg("z") = 4.0);

  m.def("pitt_check", [](const Eigen::MatrixXd& s) { return pitt_check(CovMatrix(s)); });
  m.def("horn_matrix", [] { return horn_matrix().entries(); });
  m.def("nonneg_factorization",
        [](const Eigen::MatrixXd& s, std::size_t rank, std::size_t restarts, std::size_t max_iter, double tol) {
          NonnegFactorizationOptions o;
          o.restarts = restarts;
          o.max_iter = max_iter;
          o.tol = tol;
          const auto r = nonneg_factorization(CovMatrix(s), rank, o);
          return py::make_tuple(r.found, r.factor, r.residual);
        },
        py::arg("cov"), py::arg("rank"), py::arg("restarts") = 20, py::arg("max_iter") = 20000,
        py::arg("tol") = 1e-8);

  py::class_<ConvexTestFn>(m, "ConvexTestFn")
      .def_static("call_part", &ConvexTestFn::call_part)
      .def_static("abs_dev", &ConvexTestFn::abs_dev)
      .def_static("square", &ConvexTestFn::square)
      .def_static("soft_plus", &ConvexTestFn::soft_plus)
      .def_static("linear", &ConvexTestFn::linear);

  m.def("scalar_vega_identity",
        [](const ConvexTestFn& phi, double sigma, std::size_t n_paths, std::uint64_t seed) {
          const auto r = scalar_vega_identity(phi, sigma, run_options(n_paths, seed, 0, 4.0));
          py::dict d;
          d["finite_difference"] = r.finite_difference.mean;
          d["finite_difference_stderr"] = r.finite_difference.std_error;
          d["cameron_martin"] = r.cameron_martin.mean;
          d["cameron_martin_stderr"] = r.cameron_martin.std_error;
          d["pooled_stderr"] = r.pooled_std_error;
          return d;
        },
        py::arg("phi"), py::arg("sigma"), py::arg("n_paths") = 100000, py::arg("seed") = 0);
  m.def("black_scholes_vega", &black_scholes_vega, py::arg("strike"), py::arg("sigma"));

  m.def("run_config",
        [](const std::string& text, std::optional<std::size_t> paths, std::optional<std::uint64_t> seed,
           unsigned workers) {
          RunOverrides o;
          o.paths = paths;
          o.seed = seed;
          o.workers = workers;
          ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(text, o);
          }
          py::dict d;
          d["name"] = r.name;
          d["kind"] = r.kind;
          d["report_csv"] = report_csv(r);
          d["curves_csv"] = curves_csv(r);
          d["warnings"] = r.warnings;
          d["violations"] = r.violations().size();
          return d;
        },
        py::arg("config_json"), py::arg("paths") = py::none(), py::arg("seed") = py::none(), py::arg("workers") = 0);
  m.def("list_registry", &list_registry);
}
