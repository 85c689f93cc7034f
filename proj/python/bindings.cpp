#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mfgcache/config.hpp"
#include "mfgcache/demand.hpp"
#include "mfgcache/errors.hpp"
#include "mfgcache/experiments.hpp"
#include "mfgcache/mfg_solver.hpp"
#include "mfgcache/radio.hpp"

namespace py = pybind11;
using namespace mfgcache;

namespace {

config::RunConfig resolve(const std::string& preset_or_path) {
  const std::filesystem::path p(preset_or_path);
  if (p.extension() == ".json") return config::load(p);
  return config::load(config::preset_path(preset_or_path));
}

py::array_t<double> to_array(const mfg::Grid3& g) {
  const auto& lat = g.lattice();
  py::array_t<double> out({static_cast<py::ssize_t>(lat.slices()), static_cast<py::ssize_t>(lat.nx()),
                           static_cast<py::ssize_t>(lat.nq())});
  std::copy(g.data().begin(), g.data().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-field caching solver and simulator";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<NumericError> numeric_error(m, "NumericError", base.ptr());
  static py::exception<MissingArtifact> missing(m, "MissingArtifact", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const MissingArtifact& e) {
      py::set_error(missing, e.what());
    } catch (const NumericError& e) {
      py::set_error(numeric_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::enum_<radio::Fading>(m, "Fading")
      .value("RAYLEIGH", radio::Fading::kRayleigh)
      .value("NONE", radio::Fading::kNone);

  py::class_<radio::RadioEnvironment>(m, "RadioEnvironment")
      .def(py::init<>())
      .def_readwrite("sbs_density", &radio::RadioEnvironment::sbs_density)
      .def_readwrite("user_density", &radio::RadioEnvironment::user_density)
      .def_readwrite("tx_power_w", &radio::RadioEnvironment::tx_power_w)
      .def_readwrite("pathloss_exp", &radio::RadioEnvironment::pathloss_exp)
      .def_readwrite("antennas", &radio::RadioEnvironment::antennas)
      .def_readwrite("noise_w", &radio::RadioEnvironment::noise_w)
      .def_readwrite("ball_radius_m", &radio::RadioEnvironment::ball_radius_m)
      .def_readwrite("length_unit_m", &radio::RadioEnvironment::length_unit_m)
      .def_readwrite("fading", &radio::RadioEnvironment::fading)
      .def("validate", &radio::RadioEnvironment::validate);

  m.def("active_probability", &radio::active_probability);
  m.def("mean_field_interference", &radio::mean_field_interference);
  m.def("average_rate", &radio::average_rate, py::arg("env"), py::arg("ifield"));

  m.def("expected_distinct_files", &demand::expected_distinct_files,
        py::arg("total_requests"), py::arg("theta"), py::arg("discount"));
  m.def(
      "crp_mean_popularities",
      [](std::vector<std::uint64_t> counts, double theta, double discount) {
        return demand::crp_mean_popularities(demand::CrpState(std::move(counts), theta, discount));
      },
      py::arg("counts"), py::arg("theta"), py::arg("discount"));

  m.def(
      "optimal_caching_fraction",
      [](double backhaul, double size, double overlap, double rate, double x, double dqv) {
        return mfg::optimal_caching_fraction(backhaul, size, overlap, rate, x, dqv,
                                             mfg::SolverConfig{});
      },
      py::arg("backhaul"), py::arg("size"), py::arg("overlap"), py::arg("rate"), py::arg("x"),
      py::arg("dqv"));

  m.def("preset_names", &config::preset_names);

  m.def(
      "solve",
      [](const std::string& preset_or_path, std::size_t content) {
        const auto cfg = resolve(preset_or_path);
        const auto s = [&] {
          py::gil_scoped_release release;
          return exp::solve_content(cfg, content);
        }();
        py::dict out;
        out["iterations"] = s.sol.iterations;
        out["residuals"] = s.sol.residuals;
        out["hjb_residual"] = s.residual;
        out["expected_cost"] = s.cost;
        out["rate"] = s.cfg.rate;
        out["dt"] = s.lat.dt();
        out["overlap"] = s.sol.overlap;
        out["value"] = to_array(s.sol.value);
        out["density"] = to_array(s.sol.density);
        out["policy"] = to_array(s.sol.policy);
        return out;
      },
      py::arg("preset_or_path"), py::arg("content") = 0,
      "Solve one content of a preset name or JSON config path; arrays are (t, x, Q).");

  m.def(
      "run",
      [](const std::string& command, const std::string& preset_or_path,
         const std::filesystem::path& out, int jobs) {
        const auto cfg = resolve(preset_or_path);
        py::gil_scoped_release release;
        if (command == "solve") exp::cmd_solve(cfg, out, jobs);
        else if (command == "simulate") exp::cmd_simulate(cfg, out, jobs);
        else if (command == "sweep") exp::cmd_sweep(cfg, out, jobs);
        else throw ConfigError("unknown command '" + command + "'");
      },
      py::arg("command"), py::arg("preset_or_path"), py::arg("out"), py::arg("jobs") = 1,
      "Same artifacts as the command line tool.");
}
