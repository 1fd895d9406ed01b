#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chronosim/event_queue.hpp"
#include "chronosim/kernel.hpp"
#include "chronosim/net.hpp"
#include "chronosim/plant.hpp"
#include "chronosim/scenario.hpp"
#include "chronosim/trace.hpp"

namespace chronosim::scenario {

struct NetworkMetrics {
    std::uint64_t offered = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_loss = 0;
    std::uint64_t discarded = 0;
    double delivery_ratio = 0.0;
    double latency_mean = 0.0;
    double latency_p50 = 0.0;
    double latency_p95 = 0.0;
    double latency_max = 0.0;
};

struct TaskMetrics {
    std::uint64_t released = 0;
    std::uint64_t completed = 0;
    std::uint64_t deadline_misses = 0;
    double max_response = 0.0;
};

struct RunMetrics {
    std::string status = "ok";
    std::string error;
    std::map<std::string, TaskMetrics> tasks;        // "node.task"
    std::map<int, NetworkMetrics> networks;          // network_number
    std::map<std::string, double> quadratic_cost;    // plant name -> J
    std::map<std::string, double> energy_consumed;   // node name -> joules

    std::uint64_t total_deadline_misses() const;
    std::string to_json() const;  // body of summary.json
};

// A fully assembled simulation: kernels, networks, plants, and the wiring
// between them, driven by one event queue. Single-threaded; independent
// worlds may run in parallel.
class World {
public:
    explicit World(Scenario s);
    World(const World&) = delete;
    World& operator=(const World&) = delete;

    // Dispatches every event with fire_time <= t_end in order. Runtime
    // simulation errors are recorded (status/error) and leave the traces
    // collected so far intact, with a failure marker appended.
    void run() { run_until(scenario_.duration); }
    void run_until(double t_end);

    const Scenario& scenario() const { return scenario_; }
    const TraceSet& traces() const { return traces_; }
    RunMetrics metrics() const;
    const sim::EventQueue& queue() const { return queue_; }
    const kernel::KernelNode& node(std::size_t i) const { return *nodes_[i]; }

private:
    struct ResolvedSend {
        int net_index = -1;  // index into networks_
        int net_number = 0;
        int dst = net::kBroadcast;  // world node index
        int size_bits = 0;
        int can_id = 0;
        double payload = 0.0;
    };

    struct PortBinding {
        int plant = -1;
        std::size_t port = 0;
        std::optional<net::DelaySampler> delay;
    };

    struct TaskBinding {
        TaskActionConfig::Kind kind = TaskActionConfig::Kind::Busy;
        ResolvedSend send;
        std::optional<PortBinding> sample;
        std::optional<PortBinding> actuate;
        int reference_plant = -1;
        std::optional<plant::PdControl> pd;
    };

    struct PlantRuntime {
        std::string name;
        plant::PlantSim sim;
        plant::ReferenceSignal reference;
        std::vector<ResponseRow> rows;
    };

    void build();
    void run_action(int node_index, int task_index, double t);
    void send_from(int node_index, const ResolvedSend& send, double payload, double t);
    void schedule_response_sample(std::size_t plant_index, std::uint64_t k);
    int node_index(const std::string& name) const;
    int network_index(int network_number) const;

    Scenario scenario_;
    sim::EventQueue queue_;
    std::vector<std::unique_ptr<kernel::KernelNode>> nodes_;
    std::vector<std::unique_ptr<net::Network>> networks_;
    std::vector<PlantRuntime> plants_;
    std::vector<std::vector<TaskBinding>> bindings_;  // [node][task]
    TraceSet traces_;
    std::string status_ = "ok";
    std::string error_;
    double t_end_ = 0.0;
    bool ran_ = false;
};

struct Manifest {
    std::string scenario_name;
    std::uint64_t root_seed = 0;
    double duration = 0.0;
    std::string status = "ok";
    std::string error;
    std::vector<std::string> files;  // everything written except the manifest itself

    std::string to_json() const;
};

// Runs the scenario and writes the selected traces, summary.json, and
// manifest.json into out_dir (created if needed).
Manifest run_scenario(const Scenario& s, const std::string& out_dir);

}  // namespace chronosim::scenario
