#include <cstring>

#include "chronosim/scenario.hpp"
#include "doctest.h"

using namespace chronosim;
using namespace chronosim::scenario;

namespace {

// Smallest valid scenario: one node, one periodic task, no network.
const char* kMinimal = R"({
  "name": "minimal",
  "duration": 0.1,
  "nodes": [
    {
      "name": "solo",
      "node_number": 1,
      "tasks": [
        {
          "name": "tick",
          "activation": {"type": "periodic", "period": 0.01},
          "deadline": 0.01,
          "exec_time": {"type": "constant", "value": 0.001}
        }
      ]
    }
  ]
})";

std::string wireless_doc(bool with_position) {
    std::string position = with_position ? R"("position": [0, 0],)" : "";
    return R"({
  "name": "w", "duration": 0.1,
  "networks": [
    {"type": "wlan", "network_number": 1, "data_rate": 1e6, "min_frame": 100}
  ],
  "nodes": [
    {"name": "a", "node_number": 1, "networks": [1], )" +
           position + R"(
     "tasks": [{"name": "t", "activation": {"type": "periodic", "period": 0.01},
                "deadline": 0.01, "exec_time": {"type": "constant", "value": 0.001}}]}
  ]
})";
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal config loads") {
    Scenario s = parse_scenario(kMinimal);
    CHECK(s.name == "minimal");
    CHECK(s.nodes.size() == 1);
    CHECK(s.nodes[0].tasks[0].periodic);
    CHECK(s.root_seed == 1);  // default
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_scenario("{\n  \"duration\": oops\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() > 1);
    }
}

TEST_CASE("duplicate network numbers are rejected") {
    std::string doc = R"({
      "name": "x", "duration": 1,
      "networks": [
        {"type": "csma_cd", "network_number": 7, "data_rate": 1e6, "min_frame": 100},
        {"type": "can", "network_number": 7, "data_rate": 1e6, "min_frame": 100}
      ],
      "nodes": []
    })";
    try {
        parse_scenario(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.rule() == "DuplicateNetworkNumber");
    }
}

TEST_CASE("wireless nodes need positions") {
    CHECK_NOTHROW(parse_scenario(wireless_doc(true)));
    try {
        parse_scenario(wireless_doc(false));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.rule() == "MissingPosition");
    }
}

TEST_CASE("duplicate can ids are rejected at validation") {
    std::string doc = R"({
      "name": "x", "duration": 1,
      "networks": [{"type": "can", "network_number": 1, "data_rate": 1e6, "min_frame": 100}],
      "nodes": [
        {"name": "a", "node_number": 1, "networks": [1], "can_id": 3, "tasks": []},
        {"name": "b", "node_number": 2, "networks": [1], "can_id": 3, "tasks": []}
      ]
    })";
    try {
        parse_scenario(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.rule() == "DuplicateCanId");
    }
}

TEST_CASE("off-grid sampling periods are rejected") {
    std::string doc = R"({
      "name": "x", "duration": 1,
      "networks": [{"type": "csma_cd", "network_number": 1, "data_rate": 1e6, "min_frame": 100}],
      "plants": [{"name": "p", "model": {"type": "dc_servo"}, "h_int": 0.0003}],
      "nodes": [
        {"name": "a", "node_number": 1, "networks": [1],
         "tasks": [{"name": "s", "activation": {"type": "periodic", "period": 0.01},
                    "deadline": 0.01, "exec_time": {"type": "constant", "value": 0.001},
                    "action": {"type": "sample_send", "network": 1, "dest": "a", "size": 100}}]}
      ],
      "links": [{"node": "a", "task": "s", "sample": {"plant": "p", "port": 0}}]
    })";
    try {
        parse_scenario(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.rule() == "SampleOffGrid");
    }
}

TEST_CASE("handlers must be event-triggered tasks") {
    std::string doc = R"({
      "name": "x", "duration": 1,
      "networks": [{"type": "csma_cd", "network_number": 1, "data_rate": 1e6, "min_frame": 100}],
      "nodes": [
        {"name": "a", "node_number": 1, "networks": [1],
         "handlers": {"1": "t"},
         "tasks": [{"name": "t", "activation": {"type": "periodic", "period": 0.01},
                    "deadline": 0.01, "exec_time": {"type": "constant", "value": 0.001}}]}
      ]
    })";
    try {
        parse_scenario(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.rule() == "HandlerNotEventTriggered");
    }
}

TEST_CASE("node_count declarations must match attachments") {
    std::string doc = R"({
      "name": "x", "duration": 1,
      "networks": [{"type": "csma_cd", "network_number": 1, "node_count": 3,
                    "data_rate": 1e6, "min_frame": 100}],
      "nodes": [{"name": "a", "node_number": 1, "networks": [1], "tasks": []}]
    })";
    try {
        parse_scenario(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.rule() == "NodeCountMismatch");
    }
}

TEST_CASE("unknown references are named") {
    std::string doc = R"({
      "name": "x", "duration": 1,
      "nodes": [{"name": "a", "node_number": 1, "networks": [9], "tasks": []}]
    })";
    try {
        parse_scenario(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.rule() == "UnknownNetwork");
    }
}

TEST_CASE("structurally mangled documents fail cleanly, never crash") {
    // Take the benchmark config and replace each value with a wrong-typed
    // stand-in; every mutation must surface as a ConfigError.
    std::string base = R"({
      "name": "m", "duration": 1,
      "networks": [{"type": "wlan", "network_number": 1, "data_rate": 1e6, "min_frame": 100}],
      "plants": [{"name": "p", "model": {"type": "dc_servo"}, "h_int": 1e-4}],
      "nodes": [
        {"name": "a", "node_number": 1, "networks": [1], "position": [0, 0],
         "handlers": {"1": "h"},
         "tasks": [{"name": "h", "activation": {"type": "event"}, "deadline": 0.01,
                    "exec_time": {"type": "constant", "value": 0.001},
                    "action": {"type": "actuate"}}]}
      ],
      "links": [{"node": "a", "task": "h", "actuate": {"plant": "p", "port": 0}}]
    })";
    CHECK_NOTHROW(parse_scenario(base));
    const char* needles[] = {"\"wlan\"",     "1e6",       "\"event\"", "[0, 0]",
                             "\"constant\"", "\"actuate\"", "0.01",      "\"dc_servo\"",
                             "{\"1\": \"h\"}", "\"p\""};
    const char* stand_ins[] = {"17", "\"fast\"", "[]", "\"origin\"", "null",
                               "3.5", "\"soon\"", "[1,2]", "{\"x\": \"h\"}", "[]"};
    for (int i = 0; i < 10; ++i) {
        std::string doc = base;
        auto at = doc.find(needles[i]);
        REQUIRE(at != std::string::npos);
        doc.replace(at, std::strlen(needles[i]), stand_ins[i]);
        CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
    }
}

TEST_CASE("canonical serialization round-trips") {
    Scenario s1 = parse_scenario(kMinimal);
    std::string j1 = scenario_to_json(s1);
    Scenario s2 = parse_scenario(j1);
    CHECK(scenario_to_json(s2) == j1);
}

TEST_CASE("zigbee networks get low-rate defaults, overridable") {
    std::string doc = R"({
      "name": "z", "duration": 0.1,
      "networks": [{"type": "zigbee", "network_number": 1}],
      "nodes": [{"name": "a", "node_number": 1, "networks": [1], "position": [0, 0],
                 "tasks": []}]
    })";
    Scenario s = parse_scenario(doc);
    CHECK(s.networks[0].wireless.data_rate == 250e3);
    CHECK(s.networks[0].wireless.slot_time == 320e-6);
    CHECK(s.networks[0].wireless.cw_min_slots == 8);

    std::string wl = doc;
    wl.replace(wl.find("zigbee"), 6, "wlan");
    Scenario w = parse_scenario(wl);
    CHECK(w.networks[0].wireless.data_rate == 11e6);  // 802.11b default
    CHECK(w.networks[0].wireless.slot_time == 20e-6);
}

TEST_CASE("the shipped scenarios parse, validate, and round-trip") {
    for (const char* name :
         {"dcservo_wlan.json", "dcservo_ethernet.json", "minimal.json", "can_bus.json",
          "wireless_energy.json", "ultrasound_ping.json", "tdma_ring.json"}) {
        std::string path = std::string(CHRONOSIM_SOURCE_DIR) + "/scenarios/" + name;
        Scenario s = load_scenario(path);
        std::string canon = scenario_to_json(s);
        CHECK(scenario_to_json(parse_scenario(canon)) == canon);
    }
}

}  // TEST_SUITE
