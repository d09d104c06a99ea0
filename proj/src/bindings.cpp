// Python surface: scenario I/O, validation, and closed-loop episodes.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "sdcbf/errors.hpp"
#include "sdcbf/scenario.hpp"
#include "sdcbf/sim.hpp"

namespace py = pybind11;
using namespace sdcbf;

namespace {

// Episode output bundled with the compiled scenario it came from, so the
// artifact writers stay usable from python without recompiling.
struct RunResult {
  SimLog log;
  std::shared_ptr<const CompiledScenario> scenario;

  std::string summary_json() const {
    std::ostringstream s;
    write_summary_json(log, *scenario, s);
    return s.str();
  }
  std::string trajectory_csv() const {
    std::ostringstream s;
    write_trajectory_csv(log, s);
    return s.str();
  }
  std::string steps_csv() const {
    std::ostringstream s;
    write_steps_csv(log, s);
    return s.str();
  }
  std::string timing_json() const {
    std::ostringstream s;
    write_timing_json(log, s);
    return s.str();
  }
  void write_artifacts(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (auto [leaf, text] : {std::pair<const char*, std::string>{"trajectory.csv", trajectory_csv()},
                              {"steps.csv", steps_csv()},
                              {"summary.json", summary_json()},
                              {"timing.json", timing_json()}}) {
      std::ofstream out(fs::path(dir) / leaf, std::ios::binary);
      out << text;
      if (!out) throw IOError(std::string("failed to write ") + leaf + " under " + dir);
    }
  }
};

RunResult run(const ScenarioConfig& cfg, const std::string& controller,
              std::optional<std::uint64_t> seed, std::optional<double> eps_x,
              std::optional<double> eps_u, std::optional<std::string> noise_mode,
              int substeps, bool halt_on_infeasible) {
  ScenarioConfig c = cfg;
  if (seed) c.seed = *seed;
  if (eps_x) c.eps_x = *eps_x;
  if (eps_u) c.eps_u = *eps_u;
  if (noise_mode) c.noise_mode = *noise_mode;
  auto sc = std::make_shared<CompiledScenario>(compile_scenario(c));
  NoiseModel noise{c.eps_x, c.eps_u, noise_mode_from_string(c.noise_mode), c.seed};
  SimOptions opts;
  opts.substeps = substeps;
  opts.halt_on_infeasible = halt_on_infeasible;
  return RunResult{run_episode(*sc, controller_from_string(controller), noise, opts),
                   std::move(sc)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Provably safe sampled-data control with barrier-function filtering";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("name", &ScenarioConfig::name)
      .def_readwrite("state_dim", &ScenarioConfig::state_dim)
      .def_readwrite("input_dim", &ScenarioConfig::input_dim)
      .def_readwrite("f_exprs", &ScenarioConfig::f_exprs)
      .def_readwrite("g_exprs", &ScenarioConfig::g_exprs)
      .def_readwrite("u_lo", &ScenarioConfig::u_lo)
      .def_readwrite("u_hi", &ScenarioConfig::u_hi)
      .def_readwrite("eps_u", &ScenarioConfig::eps_u)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("horizon", &ScenarioConfig::horizon)
      .def_readwrite("eps_x", &ScenarioConfig::eps_x)
      .def_readwrite("noise_mode", &ScenarioConfig::noise_mode)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("taylor_order", &ScenarioConfig::taylor_order)
      .def_readwrite("pop_tol", &ScenarioConfig::pop_tol)
      .def_readwrite("pop_budget", &ScenarioConfig::pop_budget)
      .def_readwrite("x0", &ScenarioConfig::x0)
      .def("__repr__", [](const ScenarioConfig& c) {
        return "<ScenarioConfig '" + c.name + "' " + std::to_string(c.state_dim) +
               " states, " + std::to_string(c.input_dim) + " inputs>";
      });

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("ok", &ValidationReport::ok)
      .def_readonly("lines", &ValidationReport::lines)
      .def("text", &ValidationReport::text)
      .def("__repr__", [](const ValidationReport& r) {
        return std::string("<ValidationReport ") + (r.ok ? "ok" : "invalid") + ">";
      });

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("status",
                             [](const RunResult& r) { return to_string(r.log.status); })
      .def_property_readonly("status_detail",
                             [](const RunResult& r) { return r.log.status_detail; })
      .def_property_readonly("controller",
                             [](const RunResult& r) { return to_string(r.log.controller); })
      .def_property_readonly("dt", [](const RunResult& r) { return r.log.dt; })
      .def_property_readonly("horizon", [](const RunResult& r) { return r.log.horizon; })
      .def_property_readonly("substeps", [](const RunResult& r) { return r.log.substeps; })
      .def_property_readonly("steps",
                             [](const RunResult& r) { return r.log.steps.size(); })
      .def_property_readonly("min_h",
                             [](const RunResult& r) {
                               return std::vector<double>(
                                   r.log.min_h.data(), r.log.min_h.data() + r.log.min_h.size());
                             })
      .def_property_readonly("min_h_overall",
                             [](const RunResult& r) { return r.log.min_h_overall; })
      .def_property_readonly("violation", [](const RunResult& r) { return r.log.violation; })
      .def_property_readonly("first_violation_time",
                             [](const RunResult& r) { return r.log.first_violation_time; })
      .def_property_readonly("qp_infeasible_steps",
                             [](const RunResult& r) { return r.log.qp_infeasible_steps; })
      .def_property_readonly("fine_t",
                             [](const RunResult& r) {
                               std::vector<double> t;
                               t.reserve(r.log.fine.size());
                               for (const auto& p : r.log.fine) t.push_back(p.t);
                               return t;
                             })
      .def_property_readonly("fine_x",
                             [](const RunResult& r) {
                               std::vector<Eigen::VectorXd> x;
                               x.reserve(r.log.fine.size());
                               for (const auto& p : r.log.fine) x.push_back(p.x);
                               return x;
                             })
      .def_property_readonly("fine_h",
                             [](const RunResult& r) {
                               std::vector<Eigen::VectorXd> h;
                               h.reserve(r.log.fine.size());
                               for (const auto& p : r.log.fine) h.push_back(p.h);
                               return h;
                             })
      .def("summary_json", &RunResult::summary_json)
      .def("trajectory_csv", &RunResult::trajectory_csv)
      .def("steps_csv", &RunResult::steps_csv)
      .def("timing_json", &RunResult::timing_json)
      .def("write_artifacts", &RunResult::write_artifacts, py::arg("dir"))
      .def("__repr__", [](const RunResult& r) {
        std::ostringstream s;
        s << "<RunResult " << to_string(r.log.controller) << " status="
          << to_string(r.log.status) << " steps=" << r.log.steps.size()
          << " min_h=" << r.log.min_h_overall << ">";
        return s.str();
      });

  m.def("load_scenario", &load_scenario, py::arg("path"),
        "Read a scenario file from disk.");
  m.def("parse_scenario", &parse_scenario, py::arg("text"),
        "Parse the plain-text scenario format.");
  m.def("serialize_scenario", &serialize_scenario, py::arg("config"),
        "Canonical text form; parse(serialize(c)) == c.");
  m.def("validate", &validate_scenario, py::arg("config"),
        "Side-effect-free static validation report.");
  m.def("run", &run, py::arg("config"), py::arg("controller") = "usdcbf", py::kw_only(),
        py::arg("seed") = py::none(), py::arg("eps_x") = py::none(),
        py::arg("eps_u") = py::none(), py::arg("noise_mode") = py::none(),
        py::arg("substeps") = 100, py::arg("halt_on_infeasible") = true,
        "Run one closed-loop episode with optional overrides.\n"
        "controller: 'naive' (no filtering), 'sdcbf' (margin from the measured\n"
        "point), or 'usdcbf' (margin from the eps_x ball, shrunk input box).");
}
