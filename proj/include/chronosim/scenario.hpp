#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chronosim/delay_model.hpp"
#include "chronosim/net_wired.hpp"
#include "chronosim/net_wireless.hpp"
#include "chronosim/plant.hpp"
#include "chronosim/task.hpp"

namespace chronosim::scenario {

// What a task does when one of its jobs completes.
struct TaskActionConfig {
    enum class Kind { Busy, Send, SampleSend, PdSend, Actuate } kind = Kind::Busy;
    int network = 0;            // network_number (send variants)
    std::string dest;           // node name or "broadcast"
    int size_bits = 0;
    double payload = 0.0;       // Send only
    std::optional<int> can_id;  // per-message override on CAN
    double pd_gain = 0.0;       // PdSend
    double pd_td = 0.0;
    double pd_h = 0.0;
};

struct TaskConfig {
    std::string name;
    bool periodic = true;
    double period = 0.0;
    double first_release = 0.0;
    double deadline = 0.0;
    kernel::ExecTimeModel exec;
    int priority = 0;
    TaskActionConfig action;
};

struct NodeConfig {
    std::string name;
    int node_number = 0;
    std::vector<int> networks;  // network_numbers this node attaches to
    std::optional<net::Position> position;
    kernel::SchedulingPolicy policy = kernel::SchedulingPolicy::EDF;
    double context_switch = 0.0;
    kernel::ClockModel clock;
    std::optional<double> battery_capacity;
    std::optional<int> can_id;  // default arbitration id, node_number if unset
    std::vector<TaskConfig> tasks;
    std::map<int, std::string> handlers;  // network_number -> task name
};

struct NetworkConfigAny {
    enum class Kind { CsmaCd, Can, Tdma, Wlan, Zigbee, Ultrasound } kind = Kind::CsmaCd;
    net::NetworkConfig wired;
    net::WirelessConfig wireless;
    net::UltrasoundConfig ultrasound;
    std::optional<int> declared_node_count;

    int network_number() const;
    bool is_wired() const {
        return kind == Kind::CsmaCd || kind == Kind::Can || kind == Kind::Tdma;
    }
    bool is_wireless() const { return kind == Kind::Wlan || kind == Kind::Zigbee; }
    bool needs_positions() const { return is_wireless() || kind == Kind::Ultrasound; }
};

struct PlantConfig {
    std::string name;
    bool is_dc_servo = true;
    double servo_a = 1.0;
    double servo_b = 1000.0;
    plant::LtiPlant lti;  // used when is_dc_servo is false
    double h_int = 1e-4;
    plant::ReferenceSignal reference;
};

// Binding of a plant port to a task, with an optional serial delay element.
struct LinkConfig {
    enum class Kind { Sample, Actuate, Reference } kind = Kind::Sample;
    std::string node;
    std::string task;
    std::string plant;
    std::size_t port = 0;
    std::optional<net::DelayModel> delay;
};

struct OutputsConfig {
    bool schedule = true;
    bool network = true;
    bool response = true;
    bool energy = true;
    bool events = true;
    double response_dt = 1e-3;
};

struct Scenario {
    std::string name;
    double duration = 0.0;
    std::uint64_t root_seed = 1;
    std::vector<NodeConfig> nodes;
    std::vector<NetworkConfigAny> networks;
    std::vector<PlantConfig> plants;
    std::vector<LinkConfig> links;
    OutputsConfig outputs;
};

// Parses and fully validates a scenario document. Throws ParseError with
// line/column on syntax problems and ValidationError with the violated rule
// name otherwise.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// Canonical serialization; load(write(s)) == s.
std::string scenario_to_json(const Scenario& s);

void validate(const Scenario& s);

}  // namespace chronosim::scenario
