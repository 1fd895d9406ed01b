// chronosim command line: run, validate, sweep, bench, plot.
//
// Exit codes: 0 success, 2 configuration/validation error, 3 runtime
// simulation error.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chronosim/benchmark.hpp"
#include "chronosim/svg_plot.hpp"
#include "chronosim/sweep.hpp"
#include "chronosim/world.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string default_out_dir(const std::string& cli_value) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("CHRONOSIM_OUT")) return env;
    return "chronosim_out";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw chronosim::ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace chronosim;

    CLI::App app{"chronosim - discrete-event co-simulator for networked control systems"};
    app.require_subcommand(1);

    // run
    std::string run_path, run_out;
    double run_until = -1.0;
    std::int64_t run_seed = -1;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write traces");
    run_cmd->add_option("scenario", run_path, "Scenario JSON file")->required();
    run_cmd->add_option("--seed", run_seed, "Override the root seed");
    run_cmd->add_option("--until", run_until, "Override the duration (seconds)");
    run_cmd->add_option("--out", run_out, "Output directory (default $CHRONOSIM_OUT)");

    // validate
    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Validate a scenario file");
    validate_cmd->add_option("scenario", validate_path, "Scenario JSON file")->required();

    // sweep
    std::string sweep_path, sweep_param, sweep_values, sweep_out;
    int sweep_seeds = 1;
    std::int64_t sweep_seed = -1;
    auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep over a scenario");
    sweep_cmd->add_option("scenario", sweep_path, "Scenario JSON file")->required();
    sweep_cmd->add_option("--param", sweep_param, "Dot-separated config path")->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->required();
    sweep_cmd->add_option("--seeds", sweep_seeds, "Number of seeds per value");
    sweep_cmd->add_option("--seed", sweep_seed, "Base seed (default scenario root_seed)");
    sweep_cmd->add_option("--out", sweep_out, "Output directory for sweep.csv");

    // bench
    std::string bench_what = "dcservo", bench_policy = "edf", bench_delay, bench_out;
    double bench_loss = 0.0;
    std::int64_t bench_seed = 1;
    auto* bench_cmd = app.add_subcommand("bench", "Run the DC-servo-over-WLAN benchmark");
    bench_cmd->add_option("target", bench_what, "Benchmark name (dcservo)");
    bench_cmd->add_option("--policy", bench_policy, "Scheduling policy: fp|dm|edf")
        ->check(CLI::IsMember({"fp", "rm", "dm", "edf"}));
    bench_cmd->add_option("--loss", bench_loss, "Packet loss probability");
    bench_cmd->add_option("--delay", bench_delay,
                          "Actuator delay model, e.g. constant:0.002 or "
                          "markov:0.1,0.5,0.001,0.01");
    bench_cmd->add_option("--seed", bench_seed, "Root seed");
    bench_cmd->add_option("--out", bench_out, "Output directory (default $CHRONOSIM_OUT)");

    // plot
    std::vector<std::string> plot_files;
    std::string plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "Render trace CSV files to SVG");
    plot_cmd->add_option("traces", plot_files, "Trace CSV files")->required();
    plot_cmd->add_option("--out", plot_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            scenario::Scenario s = scenario::load_scenario(run_path);
            if (run_seed >= 0) s.root_seed = static_cast<std::uint64_t>(run_seed);
            if (run_until >= 0.0) s.duration = run_until;
            scenario::Manifest manifest =
                scenario::run_scenario(s, default_out_dir(run_out));
            std::cout << manifest.to_json();
            return manifest.status == "ok" ? kExitOk : kExitRuntime;
        }
        if (*validate_cmd) {
            scenario::Scenario s = scenario::load_scenario(validate_path);
            std::cout << "ok: " << s.name << " (" << s.nodes.size() << " nodes, "
                      << s.networks.size() << " networks, " << s.plants.size() << " plants)\n";
            return kExitOk;
        }
        if (*sweep_cmd) {
            std::vector<std::string> values;
            std::stringstream ss(sweep_values);
            std::string item;
            while (std::getline(ss, item, ',')) values.push_back(item);
            std::optional<std::uint64_t> base;
            if (sweep_seed >= 0) base = static_cast<std::uint64_t>(sweep_seed);
            auto rows = scenario::sweep(read_file(sweep_path), sweep_param, values, sweep_seeds,
                                        base);
            std::string csv = scenario::sweep_to_csv(rows);
            std::string dir = default_out_dir(sweep_out);
            std::filesystem::create_directories(dir);
            std::ofstream out(std::filesystem::path(dir) / "sweep.csv", std::ios::binary);
            out << csv;
            std::cout << csv;
            for (const auto& row : rows) {
                if (row.metrics.status != "ok") return kExitRuntime;
            }
            return kExitOk;
        }
        if (*bench_cmd) {
            if (bench_what != "dcservo") {
                std::cerr << "unknown benchmark: " << bench_what << "\n";
                return kExitConfig;
            }
            std::optional<net::DelayModel> delay;
            if (!bench_delay.empty()) delay = net::parse_delay_model(bench_delay);
            scenario::Scenario s = scenario::make_dcservo_scenario(
                kernel::policy_from_string(bench_policy), bench_loss, delay,
                static_cast<std::uint64_t>(bench_seed));
            scenario::Manifest manifest =
                scenario::run_scenario(s, default_out_dir(bench_out));
            std::cout << manifest.to_json();
            return manifest.status == "ok" ? kExitOk : kExitRuntime;
        }
        if (*plot_cmd) {
            auto written = scenario::render_plots(plot_files, plot_out);
            for (const auto& name : written) std::cout << name << "\n";
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
