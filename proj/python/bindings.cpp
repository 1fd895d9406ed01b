#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chronosim/benchmark.hpp"
#include "chronosim/response_time.hpp"
#include "chronosim/svg_plot.hpp"
#include "chronosim/sweep.hpp"
#include "chronosim/world.hpp"

namespace py = pybind11;
using namespace chronosim;

namespace {

scenario::Scenario load_with_overrides(const std::string& path, std::int64_t seed,
                                       double until) {
    scenario::Scenario s = scenario::load_scenario(path);
    if (seed >= 0) s.root_seed = static_cast<std::uint64_t>(seed);
    if (until >= 0.0) s.duration = until;
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete-event co-simulator for networked control systems: "
              "real-time kernels, wired/wireless/ultrasound networks, and "
              "continuous plants.";

    // Base first: translators run most-recently-registered first, so the
    // ConfigError translator must sit ahead of the SimError one.
    py::register_exception<SimError>(m, "SimulationError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "validate",
        [](const std::string& path) {
            scenario::Scenario s = scenario::load_scenario(path);
            return py::make_tuple(s.name, s.nodes.size(), s.networks.size(), s.plants.size());
        },
        py::arg("path"),
        "Parse and validate a scenario file; returns (name, nodes, networks, plants).");

    m.def(
        "run_json",
        [](const std::string& path, const std::string& out_dir, std::int64_t seed,
           double until) {
            scenario::Manifest manifest =
                scenario::run_scenario(load_with_overrides(path, seed, until), out_dir);
            return manifest.to_json();
        },
        py::arg("path"), py::arg("out_dir"), py::arg("seed") = -1, py::arg("until") = -1.0,
        "Run a scenario, write traces into out_dir, return the manifest as JSON text.");

    m.def(
        "metrics_json",
        [](const std::string& path, std::int64_t seed, double until) {
            scenario::World world(load_with_overrides(path, seed, until));
            world.run();
            return world.metrics().to_json();
        },
        py::arg("path"), py::arg("seed") = -1, py::arg("until") = -1.0,
        "Run a scenario in memory and return its metrics as JSON text.");

    m.def(
        "bench_dcservo_json",
        [](const std::string& policy, double loss, const std::string& delay,
           std::uint64_t seed) {
            std::optional<net::DelayModel> model;
            if (!delay.empty()) model = net::parse_delay_model(delay);
            auto metrics = scenario::benchmark_dcservo(kernel::policy_from_string(policy), loss,
                                                       model, seed);
            return metrics.to_json();
        },
        py::arg("policy") = "edf", py::arg("loss") = 0.0, py::arg("delay") = "",
        py::arg("seed") = 1,
        "Run the DC-servo-over-WLAN benchmark; returns metrics as JSON text.");

    m.def(
        "sweep_csv",
        [](const std::string& scenario_json, const std::string& param,
           const std::vector<std::string>& values, int seeds) {
            return scenario::sweep_to_csv(scenario::sweep(scenario_json, param, values, seeds));
        },
        py::arg("scenario_json"), py::arg("param"), py::arg("values"), py::arg("seeds") = 1,
        "Parameter sweep over a scenario document; returns the metrics table as CSV.");

    m.def(
        "response_time_fp",
        [](const std::vector<std::tuple<double, double, double, int>>& tasks,
           const std::string& policy) {
            std::vector<kernel::TaskSpec> specs;
            int index = 0;
            for (const auto& [c, period, deadline, prio] : tasks) {
                kernel::TaskSpec t;
                t.name = "t" + std::to_string(index++);
                t.periodic = true;
                t.period = period;
                t.rel_deadline = deadline;
                t.exec_time = kernel::ExecTimeModel::make_constant(c);
                t.fixed_priority = prio;
                specs.push_back(t);
            }
            std::vector<std::pair<bool, double>> out;
            for (const auto& r : kernel::response_time_fp(specs,
                                                          kernel::policy_from_string(policy))) {
                out.emplace_back(r.schedulable, r.response);
            }
            return out;
        },
        py::arg("tasks"), py::arg("policy") = "fp",
        "Worst-case response times for (C, T, D, priority) tasks under fp/rm/dm.");

    m.def("tx_duration", &net::tx_duration, py::arg("size_bits"), py::arg("data_rate"),
          py::arg("min_frame_bits"),
          "Frame airtime: max(size, min_frame) / data_rate seconds.");

    m.def("received_power", &net::received_power, py::arg("p_tx_mw"), py::arg("distance_m"),
          py::arg("pathloss_exp"),
          "Power-law received power with a 1 m reference-distance clamp.");

    m.def("tx_energy", &net::tx_energy, py::arg("p_tx_mw"), py::arg("duration_s"),
          "Radio energy of one transmission in joules.");

    m.def("quadratic_cost", &plant::quadratic_cost, py::arg("times"), py::arg("reference"),
          py::arg("output"), "Trapezoid integral of the squared tracking error.");

    m.def("render_plots", &scenario::render_plots, py::arg("trace_files"), py::arg("out_dir"),
          "Render trace CSV files to SVG; returns the written file names.");

    m.attr("__version__") = "0.1.0";
}
