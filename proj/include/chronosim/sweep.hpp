#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chronosim/world.hpp"

namespace chronosim::scenario {

struct SweepRow {
    std::string param;
    std::string value;
    std::uint64_t seed = 0;
    RunMetrics metrics;
};

// Cartesian product of values x seeds over a base scenario document. The
// parameter path is dot-separated into the JSON config ("networks.0.loss_prob")
// and must resolve; otherwise UnknownParameterError. Seeds are
// base_seed, base_seed+1, ... Runs execute in parallel, one world per
// worker; results keep (value, seed) order.
std::vector<SweepRow> sweep(const std::string& scenario_json, const std::string& param_path,
                            const std::vector<std::string>& values, int seeds,
                            std::optional<std::uint64_t> base_seed = {});

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace chronosim::scenario
