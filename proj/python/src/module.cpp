#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ppt/bounds.hpp"
#include "ppt/concentration.hpp"
#include "ppt/experiment.hpp"
#include "ppt/expr.hpp"
#include "ppt/metrics.hpp"

namespace py = pybind11;
using namespace ppt;

namespace {

Configuration to_configuration(const std::vector<std::vector<double>>& atoms) {
  if (atoms.empty()) return Configuration(1);
  return Configuration::from_points(atoms.front().size(), atoms);
}

IntensityMeasure intensity(const std::string& expr, double lo, double hi) {
  return make_intensity(parse_density_expr(expr), Window(lo, hi));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the ppt package";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("rho0", [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    return rho0(to_configuration(a), to_configuration(b));
  });
  m.def("rho1", [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    return rho1(to_configuration(a), to_configuration(b));
  });
  m.def("rho2", [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    return rho2(to_configuration(a), to_configuration(b)).value();
  }, "Returns float('inf') when the counts differ.");
  m.def("rho1_normalized", [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    return rho1_normalized(to_configuration(a), to_configuration(b));
  });
  m.def("distance", [](const std::string& metric, const std::vector<std::vector<double>>& a,
                       const std::vector<std::vector<double>>& b) {
    return distance(metric_from_string(metric), to_configuration(a), to_configuration(b)).value();
  }, py::arg("metric"), py::arg("omega"), py::arg("eta"));

  m.def("bound_tv_poisson", [](const std::string& p, const std::string& sigma, double lo, double hi) {
    return bound_tv_poisson(parse_density_expr(p).as_density(), intensity(sigma, lo, hi)).value;
  }, py::arg("p"), py::arg("sigma") = "const:1", py::arg("lo") = 0.0, py::arg("hi") = 1.0);
  m.def("bound_tv_gibbs", [](const std::string& phi, const std::string& sigma, double lo, double hi) {
    return bound_tv_gibbs(parse_density_expr(phi).as_potential(), intensity(sigma, lo, hi)).value;
  }, py::arg("phi"), py::arg("sigma") = "const:1", py::arg("lo") = 0.0, py::arg("hi") = 1.0);
  m.def("bound_w2_halfline", [](const std::string& u, double horizon) {
    return bound_w2_halfline(parse_time_change(u, horizon)).value;
  }, py::arg("u"), py::arg("horizon") = 1000.0);

  m.def("poisson_tail_exact", &poisson_tail_exact, py::arg("mass"), py::arg("k"));
  m.def("tail_bound_lipschitz", [](double mass, double r) { return tail_bound_lipschitz({mass, r}); },
        py::arg("mass"), py::arg("r"));
  m.def("tail_bound_count_sharp", [](double mass, double r) { return tail_bound_count_sharp({mass, r}); },
        py::arg("mass"), py::arg("r"));
  m.def("stirling_bounds", &stirling_bounds, py::arg("n"));
  m.def("isoperimetric_ratio_exact", [](const std::string& relation, std::uint64_t threshold, double mass) {
    CountEvent ev;
    if (relation == "equal") ev.relation = CountEvent::Relation::equal;
    else if (relation == "at_most") ev.relation = CountEvent::Relation::at_most;
    else if (relation == "at_least") ev.relation = CountEvent::Relation::at_least;
    else throw Error(ErrorKind::invalid_argument, "relation must be equal, at_most or at_least");
    ev.threshold = threshold;
    return isoperimetric_ratio_exact(ev, IntensityMeasure::constant(mass, Window(0.0, 1.0)));
  }, py::arg("relation"), py::arg("threshold"), py::arg("mass") = 1.0);

  m.def("verify_scenarios", &verify_scenarios);
  m.def("run_experiment_json", [](const std::string& spec, bool record_timing) {
    const ExperimentSpec parsed = parse_experiment_spec_text(spec);
    py::gil_scoped_release release;
    return serialize(run_experiment(parsed, RunOptions{record_timing}));
  }, py::arg("spec"), py::arg("record_timing") = true);
}
