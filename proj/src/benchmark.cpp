#include "chronosim/benchmark.hpp"

namespace chronosim::scenario {

// Defined in the generated benchmark_config.cpp.
extern const char* kDcservoBenchmarkJson;

const std::string& dcservo_benchmark_json() {
    static const std::string text = kDcservoBenchmarkJson;
    return text;
}

Scenario make_dcservo_scenario(kernel::SchedulingPolicy policy, double loss_prob,
                               const std::optional<net::DelayModel>& actuator_delay,
                               std::uint64_t seed) {
    Scenario s = parse_scenario(dcservo_benchmark_json());
    s.root_seed = seed;
    for (NodeConfig& node : s.nodes) node.policy = policy;
    for (NetworkConfigAny& network : s.networks) {
        if (network.is_wireless()) network.wireless.loss_prob = loss_prob;
        if (network.is_wired()) network.wired.loss_prob = loss_prob;
    }
    if (actuator_delay) {
        actuator_delay->validate();
        for (LinkConfig& link : s.links) {
            if (link.kind == LinkConfig::Kind::Actuate) link.delay = *actuator_delay;
        }
    }
    return s;
}

RunMetrics benchmark_dcservo(kernel::SchedulingPolicy policy, double loss_prob,
                             const std::optional<net::DelayModel>& actuator_delay,
                             std::uint64_t seed) {
    World world(make_dcservo_scenario(policy, loss_prob, actuator_delay, seed));
    world.run();
    return world.metrics();
}

}  // namespace chronosim::scenario
