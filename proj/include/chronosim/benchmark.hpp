#pragma once

#include <optional>

#include "chronosim/world.hpp"

namespace chronosim::scenario {

// JSON text of the shipped DC-servo-over-WLAN benchmark, embedded at build
// time from scenarios/dcservo_wlan.json.
const std::string& dcservo_benchmark_json();

// The benchmark scenario with overrides applied: the scheduling policy on
// every node, the WLAN loss probability, an optional delay element on the
// actuator link, and the root seed.
Scenario make_dcservo_scenario(kernel::SchedulingPolicy policy, double loss_prob = 0.0,
                               const std::optional<net::DelayModel>& actuator_delay = {},
                               std::uint64_t seed = 1);

// Assembles and runs the benchmark in memory, returning its metrics.
RunMetrics benchmark_dcservo(kernel::SchedulingPolicy policy, double loss_prob = 0.0,
                             const std::optional<net::DelayModel>& actuator_delay = {},
                             std::uint64_t seed = 1);

}  // namespace chronosim::scenario
