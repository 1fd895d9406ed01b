#include "chronosim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace chronosim::scenario {

using nlohmann::json;

int NetworkConfigAny::network_number() const {
    switch (kind) {
        case Kind::Ultrasound: return ultrasound.network_number;
        case Kind::Wlan:
        case Kind::Zigbee: return wireless.network_number;
        default: return wired.network_number;
    }
}

namespace {

[[noreturn]] void missing(const std::string& what) {
    throw ValidationError("MissingField", what + " is required");
}

const json& require(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) missing(ctx + "." + key);
    return j.at(key);
}

double require_num(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number()) {
        throw ValidationError("BadParameter", ctx + "." + key + " must be a number");
    }
    return v.get<double>();
}

std::string require_str(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_string()) {
        throw ValidationError("BadParameter", ctx + "." + key + " must be a string");
    }
    return v.get<std::string>();
}

net::DelayModel parse_delay_json(const json& j, const std::string& ctx) {
    std::string type = require_str(j, "type", ctx);
    net::DelayModel m;
    if (type == "constant") {
        m = net::DelayModel::make_constant(require_num(j, "value", ctx));
    } else if (type == "uniform") {
        m = net::DelayModel::make_uniform(require_num(j, "lo", ctx), require_num(j, "hi", ctx));
    } else if (type == "empirical") {
        m = net::DelayModel::make_empirical(
            require(j, "edges", ctx).get<std::vector<double>>(),
            require(j, "probs", ctx).get<std::vector<double>>());
    } else if (type == "markov") {
        m = net::DelayModel::make_markov(require_num(j, "p_gb", ctx), require_num(j, "p_bg", ctx),
                                         require_num(j, "delay_good", ctx),
                                         require_num(j, "delay_bad", ctx));
    } else {
        throw ValidationError("BadParameter", ctx + ": unknown delay model '" + type + "'");
    }
    m.validate();
    return m;
}

json delay_to_json(const net::DelayModel& m) {
    json j;
    switch (m.kind) {
        case net::DelayModel::Kind::Constant:
            j["type"] = "constant";
            j["value"] = m.constant;
            break;
        case net::DelayModel::Kind::Uniform:
            j["type"] = "uniform";
            j["lo"] = m.lo;
            j["hi"] = m.hi;
            break;
        case net::DelayModel::Kind::Empirical:
            j["type"] = "empirical";
            j["edges"] = m.bin_edges;
            j["probs"] = m.bin_probs;
            break;
        case net::DelayModel::Kind::Markov2State:
            j["type"] = "markov";
            j["p_gb"] = m.p_gb;
            j["p_bg"] = m.p_bg;
            j["delay_good"] = m.delay_good;
            j["delay_bad"] = m.delay_bad;
            break;
    }
    return j;
}

kernel::ExecTimeModel parse_exec_json(const json& j, const std::string& ctx) {
    std::string type = require_str(j, "type", ctx);
    if (type == "constant") {
        return kernel::ExecTimeModel::make_constant(require_num(j, "value", ctx));
    }
    if (type == "uniform") {
        return kernel::ExecTimeModel::make_uniform(require_num(j, "lo", ctx),
                                                   require_num(j, "hi", ctx));
    }
    throw ValidationError("BadParameter", ctx + ": unknown exec_time type '" + type + "'");
}

json exec_to_json(const kernel::ExecTimeModel& m) {
    json j;
    if (m.kind == kernel::ExecTimeModel::Kind::Constant) {
        j["type"] = "constant";
        j["value"] = m.constant;
    } else {
        j["type"] = "uniform";
        j["lo"] = m.lo;
        j["hi"] = m.hi;
    }
    return j;
}

TaskActionConfig parse_action_json(const json& j, const std::string& ctx) {
    TaskActionConfig a;
    std::string type = require_str(j, "type", ctx);
    auto parse_send_common = [&](TaskActionConfig& out) {
        out.network = static_cast<int>(require_num(j, "network", ctx));
        out.dest = require_str(j, "dest", ctx);
        out.size_bits = static_cast<int>(require_num(j, "size", ctx));
        if (j.contains("can_id")) out.can_id = j.at("can_id").get<int>();
    };
    if (type == "busy") {
        a.kind = TaskActionConfig::Kind::Busy;
    } else if (type == "send") {
        a.kind = TaskActionConfig::Kind::Send;
        parse_send_common(a);
        a.payload = j.value("payload", 0.0);
    } else if (type == "sample_send") {
        a.kind = TaskActionConfig::Kind::SampleSend;
        parse_send_common(a);
    } else if (type == "pd_send") {
        a.kind = TaskActionConfig::Kind::PdSend;
        parse_send_common(a);
        a.pd_gain = require_num(j, "K", ctx);
        a.pd_td = require_num(j, "Td", ctx);
        a.pd_h = require_num(j, "h", ctx);
    } else if (type == "actuate") {
        a.kind = TaskActionConfig::Kind::Actuate;
    } else {
        throw ValidationError("BadParameter", ctx + ": unknown action type '" + type + "'");
    }
    return a;
}

json action_to_json(const TaskActionConfig& a) {
    json j;
    auto send_common = [&]() {
        j["network"] = a.network;
        j["dest"] = a.dest;
        j["size"] = a.size_bits;
        if (a.can_id) j["can_id"] = *a.can_id;
    };
    switch (a.kind) {
        case TaskActionConfig::Kind::Busy: j["type"] = "busy"; break;
        case TaskActionConfig::Kind::Send:
            j["type"] = "send";
            send_common();
            j["payload"] = a.payload;
            break;
        case TaskActionConfig::Kind::SampleSend:
            j["type"] = "sample_send";
            send_common();
            break;
        case TaskActionConfig::Kind::PdSend:
            j["type"] = "pd_send";
            send_common();
            j["K"] = a.pd_gain;
            j["Td"] = a.pd_td;
            j["h"] = a.pd_h;
            break;
        case TaskActionConfig::Kind::Actuate: j["type"] = "actuate"; break;
    }
    return j;
}

TaskConfig parse_task_json(const json& j, const std::string& ctx) {
    TaskConfig t;
    t.name = require_str(j, "name", ctx);
    std::string tctx = ctx + ".task " + t.name;
    const json& act = require(j, "activation", tctx);
    std::string atype = require_str(act, "type", tctx + ".activation");
    if (atype == "periodic") {
        t.periodic = true;
        t.period = require_num(act, "period", tctx + ".activation");
        t.first_release = act.value("first_release", 0.0);
    } else if (atype == "event") {
        t.periodic = false;
    } else {
        throw ValidationError("BadParameter", tctx + ": unknown activation '" + atype + "'");
    }
    t.deadline = require_num(j, "deadline", tctx);
    t.exec = parse_exec_json(require(j, "exec_time", tctx), tctx + ".exec_time");
    t.priority = static_cast<int>(j.value("priority", 0.0));
    if (j.contains("action")) {
        t.action = parse_action_json(j.at("action"), tctx + ".action");
    }
    return t;
}

json task_to_json(const TaskConfig& t) {
    json j;
    j["name"] = t.name;
    if (t.periodic) {
        j["activation"] = {{"type", "periodic"},
                           {"period", t.period},
                           {"first_release", t.first_release}};
    } else {
        j["activation"] = {{"type", "event"}};
    }
    j["deadline"] = t.deadline;
    j["exec_time"] = exec_to_json(t.exec);
    j["priority"] = t.priority;
    j["action"] = action_to_json(t.action);
    return j;
}

NodeConfig parse_node_json(const json& j) {
    NodeConfig n;
    n.name = require_str(j, "name", "node");
    std::string ctx = "node " + n.name;
    n.node_number = static_cast<int>(require_num(j, "node_number", ctx));
    if (j.contains("networks")) {
        for (const json& v : j.at("networks")) n.networks.push_back(v.get<int>());
    }
    if (j.contains("position")) {
        const json& p = j.at("position");
        if (!p.is_array() || p.size() != 2) {
            throw ValidationError("BadParameter", ctx + ".position must be [x, y]");
        }
        n.position = net::Position{p[0].get<double>(), p[1].get<double>()};
    }
    n.policy = kernel::policy_from_string(j.value("policy", std::string("edf")));
    n.context_switch = j.value("context_switch", 0.0);
    if (j.contains("clock")) {
        n.clock.drift = j.at("clock").value("drift", 0.0);
        n.clock.offset = j.at("clock").value("offset", 0.0);
    }
    if (j.contains("battery")) {
        n.battery_capacity = require_num(j.at("battery"), "capacity", ctx + ".battery");
    }
    if (j.contains("can_id")) n.can_id = j.at("can_id").get<int>();
    for (const json& tj : require(j, "tasks", ctx)) {
        n.tasks.push_back(parse_task_json(tj, ctx));
    }
    if (j.contains("handlers")) {
        for (auto& [key, value] : j.at("handlers").items()) {
            try {
                n.handlers[std::stoi(key)] = value.get<std::string>();
            } catch (const std::invalid_argument&) {
                throw ValidationError("BadParameter",
                                      ctx + ": handler key '" + key +
                                          "' is not a network number");
            }
        }
    }
    return n;
}

json node_to_json(const NodeConfig& n) {
    json j;
    j["name"] = n.name;
    j["node_number"] = n.node_number;
    j["networks"] = n.networks;
    if (n.position) j["position"] = {n.position->x, n.position->y};
    j["policy"] = kernel::to_string(n.policy);
    j["context_switch"] = n.context_switch;
    j["clock"] = {{"drift", n.clock.drift}, {"offset", n.clock.offset}};
    if (n.battery_capacity) j["battery"] = {{"capacity", *n.battery_capacity}};
    if (n.can_id) j["can_id"] = *n.can_id;
    json tasks = json::array();
    for (const TaskConfig& t : n.tasks) tasks.push_back(task_to_json(t));
    j["tasks"] = tasks;
    json handlers = json::object();
    for (auto& [num, task] : n.handlers) handlers[std::to_string(num)] = task;
    j["handlers"] = handlers;
    return j;
}

NetworkConfigAny parse_network_json(const json& j) {
    NetworkConfigAny n;
    std::string type = require_str(j, "type", "network");
    int number = static_cast<int>(require_num(j, "network_number", "network"));
    std::string ctx = "network " + std::to_string(number);
    if (j.contains("node_count")) {
        n.declared_node_count = static_cast<int>(j.at("node_count").get<double>());
    }
    if (type == "csma_cd" || type == "can" || type == "tdma") {
        n.kind = type == "csma_cd"  ? NetworkConfigAny::Kind::CsmaCd
                 : type == "can"    ? NetworkConfigAny::Kind::Can
                                    : NetworkConfigAny::Kind::Tdma;
        n.wired.net_type = type == "csma_cd"  ? net::WiredType::CsmaCd
                           : type == "can"    ? net::WiredType::Can
                                              : net::WiredType::Tdma;
        n.wired.network_number = number;
        n.wired.data_rate = require_num(j, "data_rate", ctx);
        n.wired.min_frame = require_num(j, "min_frame", ctx);
        n.wired.loss_prob = j.value("loss_prob", 0.0);
        if (n.kind == NetworkConfigAny::Kind::Tdma) {
            n.wired.tdma_slot = require_num(j, "tdma_slot", ctx);
        }
        n.wired.validate();
    } else if (type == "wlan" || type == "zigbee") {
        n.kind = type == "wlan" ? NetworkConfigAny::Kind::Wlan : NetworkConfigAny::Kind::Zigbee;
        net::WirelessConfig& w = n.wireless;
        w.net_type = type == "wlan" ? net::WirelessType::Wlan : net::WirelessType::Zigbee;
        w.network_number = number;
        if (type == "zigbee") {
            // 802.15.4-flavoured defaults; the MAC state machine is shared.
            w.data_rate = 250e3;
            w.min_frame = 200.0;
            w.slot_time = 320e-6;
            w.cw_min_slots = 8;
        }
        w.data_rate = j.value("data_rate", w.data_rate);
        w.min_frame = j.value("min_frame", w.min_frame);
        w.loss_prob = j.value("loss_prob", 0.0);
        w.transmit_power = j.value("transmit_power", w.transmit_power);
        w.signal_threshold = j.value("signal_threshold", w.signal_threshold);
        w.pathloss_exp = j.value("pathloss_exp", w.pathloss_exp);
        w.ack_timeout = j.value("ack_timeout", 3.0 * w.min_frame / w.data_rate);
        w.retry_limit = static_cast<int>(j.value("retry_limit", 3.0));
        w.cw_min_slots = static_cast<int>(j.value("cw_min_slots", double(w.cw_min_slots)));
        w.slot_time = j.value("slot_time", w.slot_time);
        w.ack_lossy = j.value("ack_lossy", false);
        w.validate();
    } else if (type == "ultrasound") {
        n.kind = NetworkConfigAny::Kind::Ultrasound;
        n.ultrasound.network_number = number;
        n.ultrasound.ping_length = require_num(j, "ping_length", ctx);
        n.ultrasound.speed_of_sound = require_num(j, "speed_of_sound", ctx);
        n.ultrasound.validate();
    } else {
        throw ValidationError("BadParameter", ctx + ": unknown network type '" + type + "'");
    }
    return n;
}

json network_to_json(const NetworkConfigAny& n) {
    json j;
    switch (n.kind) {
        case NetworkConfigAny::Kind::CsmaCd:
        case NetworkConfigAny::Kind::Can:
        case NetworkConfigAny::Kind::Tdma:
            j["type"] = n.kind == NetworkConfigAny::Kind::CsmaCd ? "csma_cd"
                        : n.kind == NetworkConfigAny::Kind::Can  ? "can"
                                                                 : "tdma";
            j["network_number"] = n.wired.network_number;
            j["data_rate"] = n.wired.data_rate;
            j["min_frame"] = n.wired.min_frame;
            j["loss_prob"] = n.wired.loss_prob;
            if (n.kind == NetworkConfigAny::Kind::Tdma) j["tdma_slot"] = n.wired.tdma_slot;
            break;
        case NetworkConfigAny::Kind::Wlan:
        case NetworkConfigAny::Kind::Zigbee:
            j["type"] = n.kind == NetworkConfigAny::Kind::Wlan ? "wlan" : "zigbee";
            j["network_number"] = n.wireless.network_number;
            j["data_rate"] = n.wireless.data_rate;
            j["min_frame"] = n.wireless.min_frame;
            j["loss_prob"] = n.wireless.loss_prob;
            j["transmit_power"] = n.wireless.transmit_power;
            j["signal_threshold"] = n.wireless.signal_threshold;
            j["pathloss_exp"] = n.wireless.pathloss_exp;
            j["ack_timeout"] = n.wireless.ack_timeout;
            j["retry_limit"] = n.wireless.retry_limit;
            j["cw_min_slots"] = n.wireless.cw_min_slots;
            j["slot_time"] = n.wireless.slot_time;
            j["ack_lossy"] = n.wireless.ack_lossy;
            break;
        case NetworkConfigAny::Kind::Ultrasound:
            j["type"] = "ultrasound";
            j["network_number"] = n.ultrasound.network_number;
            j["ping_length"] = n.ultrasound.ping_length;
            j["speed_of_sound"] = n.ultrasound.speed_of_sound;
            break;
    }
    if (n.declared_node_count) j["node_count"] = *n.declared_node_count;
    return j;
}

PlantConfig parse_plant_json(const json& j) {
    PlantConfig p;
    p.name = require_str(j, "name", "plant");
    std::string ctx = "plant " + p.name;
    const json& model = require(j, "model", ctx);
    std::string mtype = require_str(model, "type", ctx + ".model");
    if (mtype == "dc_servo") {
        p.is_dc_servo = true;
        p.servo_a = model.value("a", 1.0);
        p.servo_b = model.value("b", 1000.0);
        p.lti = plant::dc_servo_plant(p.servo_a, p.servo_b);
    } else if (mtype == "lti") {
        p.is_dc_servo = false;
        auto flat = [&](const char* key, std::size_t& rows, std::size_t& cols) {
            const json& mat = require(model, key, ctx + ".model");
            std::vector<double> out;
            rows = mat.size();
            cols = rows ? mat[0].size() : 0;
            for (const json& row : mat) {
                if (row.size() != cols) {
                    throw ValidationError("BadParameter", ctx + ": ragged matrix " + key);
                }
                for (const json& v : row) out.push_back(v.get<double>());
            }
            return out;
        };
        std::size_t n, n2, m, pp, dummy;
        auto A = flat("A", n, n2);
        auto B = flat("B", dummy, m);
        auto C = flat("C", pp, dummy);
        auto D = flat("D", dummy, dummy);
        auto x0 = require(model, "x0", ctx + ".model").get<std::vector<double>>();
        p.lti = plant::LtiPlant::make(n, m, pp, std::move(A), std::move(B), std::move(C),
                                      std::move(D), std::move(x0));
    } else {
        throw ValidationError("BadParameter", ctx + ": unknown model type '" + mtype + "'");
    }
    p.h_int = j.value("h_int", 1e-4);
    if (j.contains("reference")) {
        const json& r = j.at("reference");
        std::string rtype = require_str(r, "type", ctx + ".reference");
        if (rtype == "constant") {
            p.reference.kind = plant::ReferenceSignal::Kind::Constant;
            p.reference.value = r.value("value", 0.0);
        } else if (rtype == "step") {
            p.reference.kind = plant::ReferenceSignal::Kind::Step;
            p.reference.value = require_num(r, "value", ctx + ".reference");
            p.reference.at = r.value("at", 0.0);
        } else if (rtype == "square") {
            p.reference.kind = plant::ReferenceSignal::Kind::Square;
            p.reference.value = require_num(r, "amplitude", ctx + ".reference");
            p.reference.square_period = require_num(r, "period", ctx + ".reference");
        } else {
            throw ValidationError("BadParameter", ctx + ": unknown reference '" + rtype + "'");
        }
    }
    return p;
}

json plant_to_json(const PlantConfig& p) {
    json j;
    j["name"] = p.name;
    if (p.is_dc_servo) {
        j["model"] = {{"type", "dc_servo"}, {"a", p.servo_a}, {"b", p.servo_b}};
    } else {
        auto nest = [&](const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
            json out = json::array();
            for (std::size_t r = 0; r < rows; ++r) {
                json row = json::array();
                for (std::size_t c = 0; c < cols; ++c) row.push_back(flat[r * cols + c]);
                out.push_back(row);
            }
            return out;
        };
        j["model"] = {{"type", "lti"},
                      {"A", nest(p.lti.A, p.lti.n, p.lti.n)},
                      {"B", nest(p.lti.B, p.lti.n, p.lti.m)},
                      {"C", nest(p.lti.C, p.lti.p, p.lti.n)},
                      {"D", nest(p.lti.D, p.lti.p, p.lti.m)},
                      {"x0", p.lti.x}};
    }
    j["h_int"] = p.h_int;
    switch (p.reference.kind) {
        case plant::ReferenceSignal::Kind::Constant:
            j["reference"] = {{"type", "constant"}, {"value", p.reference.value}};
            break;
        case plant::ReferenceSignal::Kind::Step:
            j["reference"] = {{"type", "step"},
                              {"value", p.reference.value},
                              {"at", p.reference.at}};
            break;
        case plant::ReferenceSignal::Kind::Square:
            j["reference"] = {{"type", "square"},
                              {"amplitude", p.reference.value},
                              {"period", p.reference.square_period}};
            break;
    }
    return j;
}

LinkConfig parse_link_json(const json& j) {
    LinkConfig l;
    l.node = require_str(j, "node", "link");
    l.task = require_str(j, "task", "link");
    std::string ctx = "link " + l.node + "." + l.task;
    int kinds = j.contains("sample") + j.contains("actuate") + j.contains("reference");
    if (kinds != 1) {
        throw ValidationError("BadParameter",
                              ctx + " needs exactly one of sample/actuate/reference");
    }
    const json& binding = j.contains("sample")    ? j.at("sample")
                          : j.contains("actuate") ? j.at("actuate")
                                                  : j.at("reference");
    l.kind = j.contains("sample")    ? LinkConfig::Kind::Sample
             : j.contains("actuate") ? LinkConfig::Kind::Actuate
                                     : LinkConfig::Kind::Reference;
    l.plant = require_str(binding, "plant", ctx);
    l.port = static_cast<std::size_t>(binding.value("port", 0.0));
    if (j.contains("delay")) l.delay = parse_delay_json(j.at("delay"), ctx + ".delay");
    return l;
}

json link_to_json(const LinkConfig& l) {
    json j;
    j["node"] = l.node;
    j["task"] = l.task;
    json binding = {{"plant", l.plant}, {"port", l.port}};
    switch (l.kind) {
        case LinkConfig::Kind::Sample: j["sample"] = binding; break;
        case LinkConfig::Kind::Actuate: j["actuate"] = binding; break;
        case LinkConfig::Kind::Reference:
            j["reference"] = {{"plant", l.plant}};
            break;
    }
    if (l.delay) j["delay"] = delay_to_json(*l.delay);
    return j;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        int line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
            if (json_text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(e.what(), line, col);
    }

    Scenario s;
    try {
        s.name = doc.value("name", std::string("scenario"));
        s.duration = require_num(doc, "duration", "scenario");
        s.root_seed = static_cast<std::uint64_t>(doc.value("root_seed", 1.0));
        if (doc.contains("networks")) {
            for (const json& nj : doc.at("networks")) s.networks.push_back(parse_network_json(nj));
        }
        if (doc.contains("plants")) {
            for (const json& pj : doc.at("plants")) s.plants.push_back(parse_plant_json(pj));
        }
        for (const json& nj : require(doc, "nodes", "scenario")) {
            s.nodes.push_back(parse_node_json(nj));
        }
        if (doc.contains("links")) {
            for (const json& lj : doc.at("links")) s.links.push_back(parse_link_json(lj));
        }
        if (doc.contains("outputs")) {
            const json& o = doc.at("outputs");
            s.outputs.schedule = o.value("schedule", true);
            s.outputs.network = o.value("network", true);
            s.outputs.response = o.value("response", true);
            s.outputs.energy = o.value("energy", true);
            s.outputs.events = o.value("events", true);
            s.outputs.response_dt = o.value("response_dt", 1e-3);
        }
    } catch (const json::exception& e) {
        throw ValidationError("BadParameter", e.what());
    }
    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    doc["duration"] = s.duration;
    doc["root_seed"] = s.root_seed;
    json networks = json::array();
    for (const auto& n : s.networks) networks.push_back(network_to_json(n));
    doc["networks"] = networks;
    json plants = json::array();
    for (const auto& p : s.plants) plants.push_back(plant_to_json(p));
    doc["plants"] = plants;
    json nodes = json::array();
    for (const auto& n : s.nodes) nodes.push_back(node_to_json(n));
    doc["nodes"] = nodes;
    json links = json::array();
    for (const auto& l : s.links) links.push_back(link_to_json(l));
    doc["links"] = links;
    doc["outputs"] = {{"schedule", s.outputs.schedule},   {"network", s.outputs.network},
                      {"response", s.outputs.response},   {"energy", s.outputs.energy},
                      {"events", s.outputs.events},       {"response_dt", s.outputs.response_dt}};
    return doc.dump(2) + "\n";
}

void validate(const Scenario& s) {
    if (!(s.duration >= 0.0) || !std::isfinite(s.duration)) {
        throw ValidationError("BadParameter", "duration must be finite and >= 0");
    }
    if (s.outputs.response_dt <= 0.0) {
        throw ValidationError("BadParameter", "outputs.response_dt must be > 0");
    }

    // Networks: unique numbers.
    std::map<int, const NetworkConfigAny*> networks;
    for (const auto& n : s.networks) {
        int num = n.network_number();
        if (!networks.emplace(num, &n).second) {
            throw ValidationError("DuplicateNetworkNumber",
                                  "network number " + std::to_string(num) + " used twice");
        }
    }

    // Plants: unique names.
    std::map<std::string, const PlantConfig*> plants;
    for (const auto& p : s.plants) {
        if (p.h_int <= 0.0) {
            throw ValidationError("BadParameter", "plant " + p.name + ": h_int must be > 0");
        }
        if (p.reference.kind == plant::ReferenceSignal::Kind::Square &&
            p.reference.square_period <= 0.0) {
            throw ValidationError("BadParameter",
                                  "plant " + p.name + ": square reference period must be > 0");
        }
        if (!plants.emplace(p.name, &p).second) {
            throw ValidationError("DuplicatePlantName", "plant name " + p.name + " used twice");
        }
    }

    // Nodes and tasks.
    std::map<std::string, const NodeConfig*> nodes;
    std::map<int, std::set<int>> numbers_per_network;
    std::map<int, std::set<int>> can_ids_per_network;
    for (const auto& node : s.nodes) {
        if (!nodes.emplace(node.name, &node).second) {
            throw ValidationError("DuplicateNodeName", "node name " + node.name + " used twice");
        }
        if (node.position &&
            (!std::isfinite(node.position->x) || !std::isfinite(node.position->y))) {
            throw ValidationError("BadParameter",
                                  "node " + node.name + ": position must be finite");
        }
        if (node.clock.drift <= -1.0) {
            throw ValidationError("BadParameter",
                                  "node " + node.name + ": clock drift must be > -1");
        }
        if (node.context_switch < 0.0) {
            throw ValidationError("BadParameter",
                                  "node " + node.name + ": context_switch must be >= 0");
        }
        if (node.battery_capacity && *node.battery_capacity < 0.0) {
            throw ValidationError("BadParameter",
                                  "node " + node.name + ": battery capacity must be >= 0");
        }
        std::set<std::string> task_names;
        for (const auto& task : node.tasks) {
            std::string ctx = node.name + "." + task.name;
            if (!task_names.insert(task.name).second) {
                throw ValidationError("DuplicateTaskName", ctx + " declared twice");
            }
            if (task.periodic && task.period <= 0.0) {
                throw ValidationError("BadParameter", ctx + ": period must be > 0");
            }
            if (task.deadline <= 0.0) {
                throw ValidationError("BadParameter", ctx + ": deadline must be > 0");
            }
            const auto& e = task.exec;
            if (e.kind == kernel::ExecTimeModel::Kind::Constant ? e.constant <= 0.0
                                                                : (e.lo <= 0.0 || e.hi < e.lo)) {
                throw ValidationError("BadParameter", ctx + ": execution times must be > 0");
            }
        }
        for (int num : node.networks) {
            auto it = networks.find(num);
            if (it == networks.end()) {
                throw ValidationError("UnknownNetwork", "node " + node.name +
                                                            " attaches to unknown network " +
                                                            std::to_string(num));
            }
            if (!numbers_per_network[num].insert(node.node_number).second) {
                throw ValidationError("DuplicateNodeNumber",
                                      "node_number " + std::to_string(node.node_number) +
                                          " duplicated on network " + std::to_string(num));
            }
            if (it->second->needs_positions() && !node.position) {
                throw ValidationError("MissingPosition",
                                      "node " + node.name + " on network " + std::to_string(num) +
                                          " needs a position");
            }
            if (it->second->kind == NetworkConfigAny::Kind::Can) {
                int can_id = node.can_id.value_or(node.node_number);
                if (can_id <= 0) {
                    throw ValidationError("BadParameter",
                                          "node " + node.name + ": can_id must be positive");
                }
                if (!can_ids_per_network[num].insert(can_id).second) {
                    throw ValidationError("DuplicateCanId",
                                          "can_id " + std::to_string(can_id) +
                                              " duplicated on network " + std::to_string(num));
                }
            }
        }
        for (const auto& [num, task_name] : node.handlers) {
            if (std::find(node.networks.begin(), node.networks.end(), num) ==
                node.networks.end()) {
                throw ValidationError("UnknownNetwork",
                                      "node " + node.name + " registers a handler for network " +
                                          std::to_string(num) + " it is not attached to");
            }
            bool found = false;
            for (const auto& task : node.tasks) {
                if (task.name != task_name) continue;
                found = true;
                if (task.periodic) {
                    throw ValidationError("HandlerNotEventTriggered",
                                          node.name + "." + task_name +
                                              " must be event-triggered to handle messages");
                }
            }
            if (!found) {
                throw ValidationError("UnknownTask",
                                      node.name + " handler references unknown task " + task_name);
            }
        }
        // Send-style actions must target attached networks and known nodes.
        for (const auto& task : node.tasks) {
            const auto& a = task.action;
            if (a.kind == TaskActionConfig::Kind::Busy ||
                a.kind == TaskActionConfig::Kind::Actuate) {
                continue;
            }
            std::string ctx = node.name + "." + task.name;
            if (std::find(node.networks.begin(), node.networks.end(), a.network) ==
                node.networks.end()) {
                throw ValidationError("UnknownNetwork",
                                      ctx + " sends on network " + std::to_string(a.network) +
                                          " the node is not attached to");
            }
            if (a.size_bits <= 0) {
                throw ValidationError("BadParameter", ctx + ": frame size must be > 0 bits");
            }
            if (a.dest != "broadcast") {
                const NodeConfig* dest = nullptr;
                for (const auto& other : s.nodes) {
                    if (other.name == a.dest) dest = &other;
                }
                if (!dest) {
                    throw ValidationError("UnknownNode",
                                          ctx + " sends to unknown node " + a.dest);
                }
                if (std::find(dest->networks.begin(), dest->networks.end(), a.network) ==
                    dest->networks.end()) {
                    throw ValidationError("UnknownNode",
                                          ctx + " sends to " + a.dest +
                                              " which is not attached to network " +
                                              std::to_string(a.network));
                }
            }
            if (a.kind == TaskActionConfig::Kind::PdSend && a.pd_h <= 0.0) {
                throw ValidationError("BadParameter", ctx + ": pd_send needs h > 0");
            }
        }
    }

    // Declared node counts must match actual attachments.
    for (const auto& n : s.networks) {
        if (!n.declared_node_count) continue;
        int actual = static_cast<int>(numbers_per_network[n.network_number()].size());
        if (*n.declared_node_count != actual) {
            throw ValidationError("NodeCountMismatch",
                                  "network " + std::to_string(n.network_number()) + " declares " +
                                      std::to_string(*n.declared_node_count) +
                                      " nodes but has " + std::to_string(actual));
        }
    }

    // Links: references resolve; sampling stays on the integration grid.
    for (const auto& link : s.links) {
        std::string ctx = "link " + link.node + "." + link.task;
        auto node_it = nodes.find(link.node);
        if (node_it == nodes.end()) {
            throw ValidationError("UnknownNode", ctx + ": unknown node");
        }
        const TaskConfig* task = nullptr;
        for (const auto& t : node_it->second->tasks) {
            if (t.name == link.task) task = &t;
        }
        if (!task) throw ValidationError("UnknownTask", ctx + ": unknown task");
        auto plant_it = plants.find(link.plant);
        if (plant_it == plants.end()) {
            throw ValidationError("UnknownPlant", ctx + ": unknown plant " + link.plant);
        }
        const PlantConfig& plant_cfg = *plant_it->second;
        if (link.kind == LinkConfig::Kind::Sample && link.port >= plant_cfg.lti.p) {
            throw ValidationError("BadParameter", ctx + ": output port out of range");
        }
        if (link.kind == LinkConfig::Kind::Actuate && link.port >= plant_cfg.lti.m) {
            throw ValidationError("BadParameter", ctx + ": input port out of range");
        }
        if (link.kind == LinkConfig::Kind::Sample && task->periodic) {
            double ratio = task->period / plant_cfg.h_int;
            if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
                throw ValidationError("SampleOffGrid",
                                      ctx + ": sampling period is not a multiple of h_int");
            }
        }
    }

    // Tasks that need a binding must have exactly one.
    for (const auto& node : s.nodes) {
        for (const auto& task : node.tasks) {
            auto count_links = [&](LinkConfig::Kind kind) {
                int c = 0;
                for (const auto& l : s.links) {
                    if (l.node == node.name && l.task == task.name && l.kind == kind) ++c;
                }
                return c;
            };
            std::string ctx = node.name + "." + task.name;
            if (task.action.kind == TaskActionConfig::Kind::SampleSend &&
                count_links(LinkConfig::Kind::Sample) != 1) {
                throw ValidationError("MissingLink", ctx + " needs exactly one sample link");
            }
            if (task.action.kind == TaskActionConfig::Kind::Actuate &&
                count_links(LinkConfig::Kind::Actuate) != 1) {
                throw ValidationError("MissingLink", ctx + " needs exactly one actuate link");
            }
            if (task.action.kind == TaskActionConfig::Kind::PdSend &&
                count_links(LinkConfig::Kind::Reference) != 1) {
                throw ValidationError("MissingLink", ctx + " needs exactly one reference link");
            }
        }
    }
}

}  // namespace chronosim::scenario
