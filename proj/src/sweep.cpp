#include "chronosim/sweep.hpp"

#include <atomic>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace chronosim::scenario {

using nlohmann::json;

namespace {

json* navigate(json& doc, const std::string& path) {
    json* cur = &doc;
    std::stringstream ss(path);
    std::string token;
    while (std::getline(ss, token, '.')) {
        if (token.empty()) return nullptr;
        if (cur->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(token);
            } catch (const std::exception&) {
                return nullptr;
            }
            if (idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else if (cur->is_object() && cur->contains(token)) {
            cur = &cur->at(token);
        } else {
            return nullptr;
        }
    }
    return cur;
}

json parse_value(const std::string& text) {
    if (text == "true") return true;
    if (text == "false") return false;
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos == text.size()) return v;
    } catch (const std::exception&) {
    }
    return text;
}

}  // namespace

std::vector<SweepRow> sweep(const std::string& scenario_json, const std::string& param_path,
                            const std::vector<std::string>& values, int seeds,
                            std::optional<std::uint64_t> base_seed) {
    json base = json::parse(scenario_json);
    if (!navigate(base, param_path)) throw UnknownParameterError(param_path);
    std::uint64_t seed0 = base_seed.value_or(
        base.contains("root_seed") ? base.at("root_seed").get<std::uint64_t>() : 1);

    // Trace files are not produced by sweeps; metrics are enough. The
    // response grid density is kept so the J metric stays comparable.
    double response_dt = 1e-3;
    if (base.contains("outputs")) response_dt = base.at("outputs").value("response_dt", 1e-3);
    base["outputs"] = {{"schedule", false}, {"network", false}, {"response", false},
                       {"energy", false},   {"events", false},  {"response_dt", response_dt}};

    struct Task {
        std::string value;
        std::uint64_t seed;
        std::string doc;
    };
    std::vector<Task> tasks;
    for (const std::string& value : values) {
        json doc = base;
        *navigate(doc, param_path) = parse_value(value);
        for (int k = 0; k < seeds; ++k) {
            json run_doc = doc;
            run_doc["root_seed"] = seed0 + static_cast<std::uint64_t>(k);
            tasks.push_back({value, seed0 + static_cast<std::uint64_t>(k), run_doc.dump()});
        }
    }

    std::vector<SweepRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, tasks.size() ? tasks.size() : 1);
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            SweepRow row;
            row.param = param_path;
            row.value = tasks[i].value;
            row.seed = tasks[i].seed;
            World world(parse_scenario(tasks[i].doc));
            world.run();
            row.metrics = world.metrics();
            rows[i] = std::move(row);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "param,value,seed,status,deadline_misses,delivered,offered,delivery_ratio,"
        "latency_mean,latency_p95,quadratic_cost,energy_consumed\n";
    for (const SweepRow& r : rows) {
        std::uint64_t delivered = 0, offered = 0;
        double latency_mean_num = 0.0, latency_p95 = 0.0;
        for (const auto& [num, n] : r.metrics.networks) {
            delivered += n.delivered;
            offered += n.offered;
            latency_mean_num += n.latency_mean * static_cast<double>(n.delivered);
            latency_p95 = std::max(latency_p95, n.latency_p95);
        }
        double ratio = offered ? static_cast<double>(delivered) / static_cast<double>(offered)
                               : 0.0;
        double latency_mean = delivered ? latency_mean_num / static_cast<double>(delivered) : 0.0;
        double j = 0.0;
        for (const auto& [name, v] : r.metrics.quadratic_cost) j += v;
        double energy = 0.0;
        for (const auto& [name, v] : r.metrics.energy_consumed) energy += v;
        out += r.param + "," + r.value + "," + std::to_string(r.seed) + "," + r.metrics.status +
               "," + std::to_string(r.metrics.total_deadline_misses()) + "," +
               std::to_string(delivered) + "," + std::to_string(offered) + "," +
               format_value(ratio) + "," + format_value(latency_mean) + "," +
               format_value(latency_p95) + "," + format_value(j) + "," + format_value(energy) +
               "\n";
    }
    return out;
}

}  // namespace chronosim::scenario
