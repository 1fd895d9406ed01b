#include "chronosim/world.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace chronosim::scenario {

using nlohmann::json;

std::uint64_t RunMetrics::total_deadline_misses() const {
    std::uint64_t total = 0;
    for (const auto& [name, t] : tasks) total += t.deadline_misses;
    return total;
}

std::string RunMetrics::to_json() const {
    json doc;
    doc["status"] = status;
    if (!error.empty()) doc["error"] = error;
    json tasks_j = json::object();
    for (const auto& [name, t] : tasks) {
        tasks_j[name] = {{"released", t.released},
                         {"completed", t.completed},
                         {"deadline_misses", t.deadline_misses},
                         {"max_response", t.max_response}};
    }
    doc["tasks"] = tasks_j;
    json nets_j = json::object();
    for (const auto& [num, n] : networks) {
        nets_j[std::to_string(num)] = {{"offered", n.offered},
                                       {"delivered", n.delivered},
                                       {"dropped_loss", n.dropped_loss},
                                       {"discarded", n.discarded},
                                       {"delivery_ratio", n.delivery_ratio},
                                       {"latency_mean", n.latency_mean},
                                       {"latency_p50", n.latency_p50},
                                       {"latency_p95", n.latency_p95},
                                       {"latency_max", n.latency_max}};
    }
    doc["networks"] = nets_j;
    doc["quadratic_cost"] = quadratic_cost;
    doc["energy_consumed"] = energy_consumed;
    doc["deadline_misses_total"] = total_deadline_misses();
    return doc.dump(2) + "\n";
}

World::World(Scenario s) : scenario_(std::move(s)) {
    build();
}

int World::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < scenario_.nodes.size(); ++i) {
        if (scenario_.nodes[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

int World::network_index(int network_number) const {
    for (std::size_t i = 0; i < scenario_.networks.size(); ++i) {
        if (scenario_.networks[i].network_number() == network_number) return static_cast<int>(i);
    }
    return -1;
}

void World::build() {
    // Networks first so nodes can attach.
    for (const NetworkConfigAny& cfg : scenario_.networks) {
        int number = cfg.network_number();
        net::NetCallbacks cb;
        cb.on_deliver = [this, number](const net::Frame& f, int dst, double t) {
            kernel::Message msg{f.payload, f.src, number, f.enqueue_time, t};
            nodes_[dst]->deliver(number, msg, t);
        };
        cb.on_trace = [this, number](int node_idx, net::NetTraceState state, double t) {
            if (scenario_.outputs.network) {
                traces_.network.push_back(
                    {t, number, scenario_.nodes[node_idx].name, net::to_string(state)});
            }
        };
        cb.on_event = [this](const std::string& kind, const std::string& detail, double t) {
            if (scenario_.outputs.events) traces_.events.push_back({t, kind, detail});
        };
        cb.on_energy = [this](int node_idx, double joules, double t) {
            nodes_[node_idx]->consume_energy(joules, t);
        };
        switch (cfg.kind) {
            case NetworkConfigAny::Kind::CsmaCd:
            case NetworkConfigAny::Kind::Can:
            case NetworkConfigAny::Kind::Tdma:
                networks_.push_back(
                    net::make_wired_network(cfg.wired, queue_, scenario_.root_seed, cb));
                break;
            case NetworkConfigAny::Kind::Wlan:
            case NetworkConfigAny::Kind::Zigbee:
                networks_.push_back(std::make_unique<net::WlanNetwork>(cfg.wireless, queue_,
                                                                       scenario_.root_seed, cb));
                break;
            case NetworkConfigAny::Kind::Ultrasound:
                networks_.push_back(
                    std::make_unique<net::UltrasoundNetwork>(cfg.ultrasound, queue_, cb));
                break;
        }
    }

    // Plants.
    for (const PlantConfig& cfg : scenario_.plants) {
        plants_.push_back(PlantRuntime{cfg.name, plant::PlantSim(cfg.lti, cfg.h_int),
                                       cfg.reference, {}});
    }

    // Kernel nodes.
    for (std::size_t ni = 0; ni < scenario_.nodes.size(); ++ni) {
        const NodeConfig& cfg = scenario_.nodes[ni];
        std::vector<kernel::TaskSpec> tasks;
        for (const TaskConfig& t : cfg.tasks) {
            kernel::TaskSpec spec;
            spec.name = t.name;
            spec.periodic = t.periodic;
            spec.period = t.period;
            spec.first_release = t.first_release;
            spec.rel_deadline = t.deadline;
            spec.exec_time = t.exec;
            spec.fixed_priority = t.priority;
            tasks.push_back(spec);
        }
        kernel::NodeCallbacks cb;
        int node_idx = static_cast<int>(ni);
        cb.on_job_complete = [this, node_idx](int task_index, const kernel::Job&, double t) {
            run_action(node_idx, task_index, t);
        };
        cb.on_sched_trace = [this, node_idx](int task_index, kernel::TaskTraceState state,
                                             double t) {
            if (scenario_.outputs.schedule) {
                traces_.schedule.push_back({t, scenario_.nodes[node_idx].name,
                                            scenario_.nodes[node_idx].tasks[task_index].name,
                                            kernel::to_string(state)});
            }
        };
        cb.on_event = [this](const std::string& kind, const std::string& detail, double t) {
            if (scenario_.outputs.events) traces_.events.push_back({t, kind, detail});
        };
        cb.on_energy = [this, node_idx](double remaining, double t) {
            if (scenario_.outputs.energy) {
                traces_.energy.push_back({t, scenario_.nodes[node_idx].name, remaining});
            }
        };
        cb.on_power_off = [this, node_idx](double) {
            for (auto& network : networks_) network->set_powered(node_idx, false);
        };
        nodes_.push_back(std::make_unique<kernel::KernelNode>(
            node_idx, cfg.name, cfg.node_number, std::move(tasks), cfg.policy, cfg.clock,
            cfg.context_switch, cfg.battery_capacity, queue_, scenario_.root_seed, cb));

        for (int number : cfg.networks) {
            networks_[network_index(number)]->attach(node_idx, cfg.node_number, cfg.position);
        }
        for (const auto& [number, task_name] : cfg.handlers) {
            nodes_.back()->register_handler(number, nodes_.back()->task_index(task_name));
        }
    }

    // Task bindings: resolved actions plus plant port links.
    bindings_.resize(scenario_.nodes.size());
    for (std::size_t ni = 0; ni < scenario_.nodes.size(); ++ni) {
        const NodeConfig& node_cfg = scenario_.nodes[ni];
        bindings_[ni].resize(node_cfg.tasks.size());
        for (std::size_t ti = 0; ti < node_cfg.tasks.size(); ++ti) {
            const TaskConfig& task_cfg = node_cfg.tasks[ti];
            TaskBinding& b = bindings_[ni][ti];
            b.kind = task_cfg.action.kind;
            if (b.kind == TaskActionConfig::Kind::Send ||
                b.kind == TaskActionConfig::Kind::SampleSend ||
                b.kind == TaskActionConfig::Kind::PdSend) {
                const TaskActionConfig& a = task_cfg.action;
                b.send.net_index = network_index(a.network);
                b.send.net_number = a.network;
                b.send.dst = a.dest == "broadcast" ? net::kBroadcast : node_index(a.dest);
                b.send.size_bits = a.size_bits;
                b.send.payload = a.payload;
                b.send.can_id =
                    a.can_id.value_or(node_cfg.can_id.value_or(node_cfg.node_number));
            }
            if (b.kind == TaskActionConfig::Kind::PdSend) {
                b.pd = plant::PdControl{task_cfg.action.pd_gain, task_cfg.action.pd_td,
                                        task_cfg.action.pd_h, 0.0};
            }
        }
    }
    for (const LinkConfig& link : scenario_.links) {
        int ni = node_index(link.node);
        int ti = nodes_[ni]->task_index(link.task);
        TaskBinding& b = bindings_[ni][ti];
        PortBinding pb;
        for (std::size_t pi = 0; pi < plants_.size(); ++pi) {
            if (plants_[pi].name == link.plant) pb.plant = static_cast<int>(pi);
        }
        pb.port = link.port;
        if (link.delay) {
            pb.delay = net::DelaySampler(
                *link.delay, sim::RngStream(scenario_.root_seed, "link." + link.node + "." +
                                                                     link.task + ".delay"));
        }
        switch (link.kind) {
            case LinkConfig::Kind::Sample: b.sample = std::move(pb); break;
            case LinkConfig::Kind::Actuate: b.actuate = std::move(pb); break;
            case LinkConfig::Kind::Reference: b.reference_plant = pb.plant; break;
        }
    }
}

void World::send_from(int node_index, const ResolvedSend& send, double payload, double t) {
    kernel::KernelNode& node = *nodes_[node_index];
    if (!node.powered()) {
        if (scenario_.outputs.events) {
            traces_.events.push_back({t, "drop_node_off",
                                      node.name() + " tried to send while powered off"});
        }
        return;
    }
    if (send.net_index < 0 || !networks_[send.net_index]->is_attached(node_index)) {
        throw UnknownNetworkError(node.name() + " is not attached to network " +
                                  std::to_string(send.net_number));
    }
    net::Frame f;
    f.src = node_index;
    f.dst = send.dst;
    f.size_bits = send.size_bits;
    f.payload = payload;
    f.can_id = send.can_id;
    f.enqueue_time = t;
    networks_[send.net_index]->enqueue(f, t);
}

void World::run_action(int node_index, int task_index, double t) {
    TaskBinding& b = bindings_[node_index][task_index];
    kernel::KernelNode& node = *nodes_[node_index];
    switch (b.kind) {
        case TaskActionConfig::Kind::Busy:
            return;
        case TaskActionConfig::Kind::Send:
            send_from(node_index, b.send, b.send.payload, t);
            return;
        case TaskActionConfig::Kind::SampleSend: {
            PortBinding& pb = *b.sample;
            double y = plants_[pb.plant].sim.sample(pb.port, t);
            double delay = pb.delay ? pb.delay->sample() : 0.0;
            if (delay > 0.0) {
                ResolvedSend send = b.send;
                queue_.schedule(t + delay, sim::EventKind::Custom, node_index,
                                [this, node_index, send, y](const sim::SimEvent& ev) {
                                    send_from(node_index, send, y, ev.fire_time);
                                });
            } else {
                send_from(node_index, b.send, y, t);
            }
            return;
        }
        case TaskActionConfig::Kind::PdSend: {
            auto msg = node.pop_message();
            if (!msg) return;
            double r = plants_[b.reference_plant].reference.eval(t);
            double u = b.pd->step(r - msg->value);
            send_from(node_index, b.send, u, t);
            return;
        }
        case TaskActionConfig::Kind::Actuate: {
            auto msg = node.pop_message();
            if (!msg) return;
            PortBinding& pb = *b.actuate;
            double delay = pb.delay ? pb.delay->sample() : 0.0;
            double value = msg->value;
            if (delay > 0.0) {
                int plant_idx = pb.plant;
                std::size_t port = pb.port;
                queue_.schedule(t + delay, sim::EventKind::Custom, node_index,
                                [this, plant_idx, port, value](const sim::SimEvent& ev) {
                                    plants_[plant_idx].sim.actuate(port, value, ev.fire_time);
                                });
            } else {
                plants_[pb.plant].sim.actuate(pb.port, value, t);
            }
            return;
        }
    }
}

void World::schedule_response_sample(std::size_t plant_index, std::uint64_t k) {
    double t = static_cast<double>(k) * scenario_.outputs.response_dt;
    if (t > t_end_) return;
    queue_.schedule(t, sim::EventKind::PlantSample, static_cast<int>(plant_index),
                    [this, plant_index, k](const sim::SimEvent& ev) {
                        PlantRuntime& p = plants_[plant_index];
                        p.sim.advance_to(ev.fire_time);
                        double y = p.sim.model().p > 0 ? p.sim.model().output()[0] : 0.0;
                        double u = p.sim.model().m > 0 ? p.sim.model().u_hold[0] : 0.0;
                        p.rows.push_back(
                            {ev.fire_time, p.reference.eval(ev.fire_time), y, u});
                        schedule_response_sample(plant_index, k + 1);
                    });
}

void World::run_until(double t_end) {
    if (ran_) throw SimError("a world can only run once");
    ran_ = true;
    t_end_ = t_end;
    try {
        for (auto& node : nodes_) node->start();
        for (auto& network : networks_) network->start();
        for (std::size_t i = 0; i < plants_.size(); ++i) schedule_response_sample(i, 0);
        while (auto dispatched = queue_.advance_until(t_end)) {
            dispatched->action(dispatched->event);
        }
        for (auto& node : nodes_) node->account_unfinished(t_end);
    } catch (const SimError& e) {
        status_ = "failed";
        error_ = e.what();
        traces_.events.push_back({queue_.now(), "failure", e.what()});
    }
    for (auto& p : plants_) {
        if (!p.rows.empty()) traces_.response[p.name] = p.rows;
        if (scenario_.outputs.response && p.rows.empty()) traces_.response[p.name] = {};
    }
}

RunMetrics World::metrics() const {
    RunMetrics m;
    m.status = status_;
    m.error = error_;
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
        const kernel::KernelNode& node = *nodes_[ni];
        const auto& stats = node.stats();
        for (std::size_t ti = 0; ti < stats.size(); ++ti) {
            TaskMetrics tm;
            tm.released = stats[ti].released;
            tm.completed = stats[ti].completed;
            tm.deadline_misses = stats[ti].deadline_misses;
            tm.max_response = stats[ti].max_response;
            m.tasks[node.name() + "." + node.tasks()[ti].name] = tm;
        }
        if (node.battery()) m.energy_consumed[node.name()] = node.energy_consumed();
    }
    for (const auto& network : networks_) {
        const net::NetStats& s = network->stats();
        NetworkMetrics nm;
        nm.offered = s.offered;
        nm.delivered = s.delivered;
        nm.dropped_loss = s.dropped_loss;
        nm.discarded = s.discarded;
        nm.delivery_ratio = s.offered ? static_cast<double>(s.delivered) /
                                            static_cast<double>(s.offered)
                                      : 0.0;
        if (!s.latencies.empty()) {
            std::vector<double> sorted = s.latencies;
            std::sort(sorted.begin(), sorted.end());
            double sum = 0.0;
            for (double v : sorted) sum += v;
            auto rank = [&](double q) {
                std::size_t idx = static_cast<std::size_t>(
                    std::ceil(q * static_cast<double>(sorted.size())));
                return sorted[std::min(sorted.size() - 1, idx == 0 ? 0 : idx - 1)];
            };
            nm.latency_mean = sum / static_cast<double>(sorted.size());
            nm.latency_p50 = rank(0.50);
            nm.latency_p95 = rank(0.95);
            nm.latency_max = sorted.back();
        }
        m.networks[network->network_number()] = nm;
    }
    for (const auto& p : plants_) {
        std::vector<double> times, refs, outs;
        for (const ResponseRow& r : p.rows) {
            times.push_back(r.time);
            refs.push_back(r.reference);
            outs.push_back(r.output);
        }
        m.quadratic_cost[p.name] = plant::quadratic_cost(times, refs, outs);
    }
    return m;
}

std::string Manifest::to_json() const {
    json doc;
    doc["scenario"] = scenario_name;
    doc["root_seed"] = root_seed;
    doc["duration"] = duration;
    doc["status"] = status;
    if (!error.empty()) doc["error"] = error;
    doc["files"] = files;
    return doc.dump(2) + "\n";
}

Manifest run_scenario(const Scenario& s, const std::string& out_dir) {
    namespace fs = std::filesystem;
    World world(s);
    world.run();
    RunMetrics metrics = world.metrics();

    fs::create_directories(out_dir);
    Manifest manifest;
    manifest.scenario_name = s.name;
    manifest.root_seed = s.root_seed;
    manifest.duration = s.duration;
    manifest.status = metrics.status;
    manifest.error = metrics.error;

    auto write_file = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        out << content;
        manifest.files.push_back(name);
    };

    const TraceSet& traces = world.traces();
    if (s.outputs.schedule) write_file("schedule.csv", to_csv(traces.schedule));
    if (s.outputs.network) write_file("network.csv", to_csv(traces.network));
    if (s.outputs.response) {
        bool first = true;
        for (const auto& [name, rows] : traces.response) {
            write_file(first && traces.response.size() == 1 ? "response.csv"
                                                            : "response_" + name + ".csv",
                       to_csv(rows));
            first = false;
        }
    }
    if (s.outputs.energy) write_file("energy.csv", to_csv(traces.energy));
    if (s.outputs.events) write_file("events.csv", to_csv(traces.events));
    write_file("summary.json", metrics.to_json());

    std::sort(manifest.files.begin(), manifest.files.end());
    std::ofstream out(fs::path(out_dir) / "manifest.json", std::ios::binary);
    out << manifest.to_json();
    return manifest;
}

}  // namespace chronosim::scenario
