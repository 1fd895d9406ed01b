#include <map>

#include "chronosim/response_time.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace chronosim;
using namespace chronosim::kernel;
using testutil::KernelHarness;
using testutil::make_task;

TEST_SUITE("kernel") {

TEST_CASE("single job completes after its budget") {
    KernelHarness h({make_task("a", 0.002, 0.01, 0.01)}, SchedulingPolicy::FP);
    h.run_until(0.025);
    CHECK(h.node->stats()[0].completed == 3);
    CHECK(h.node->stats()[0].max_response == 0.002);
}

TEST_CASE("periodic task count over a window") {
    // period 0.01 over [0, 0.1] inclusive: 11 releases.
    KernelHarness h({make_task("a", 0.001, 0.01, 0.01)}, SchedulingPolicy::FP);
    h.run_until(0.1);
    CHECK(h.node->stats()[0].released == 11);
}

TEST_CASE("preemption splits the low task and updates remaining") {
    // Low releases at 0 (C = 3 ticks), high releases at tick 1 (C = 1 tick):
    // low runs [0,1) and [2,4), so low finishes at 4 ticks.
    double tick = testutil::kTick;
    TaskSpec low = make_task("low", 3 * tick, 100 * tick, 100 * tick, 2);
    TaskSpec high = make_task("high", 1 * tick, 100 * tick, 100 * tick, 1);
    high.first_release = 1 * tick;
    KernelHarness h({low, high}, SchedulingPolicy::FP);
    h.run_until(50 * tick);
    CHECK(h.node->stats()[0].max_response == 4 * tick);
    CHECK(h.node->stats()[1].max_response == 1 * tick);
}

TEST_CASE("context switch delays the start without touching the budget") {
    TaskSpec t = make_task("a", 0.001, 0.01, 0.01);
    KernelHarness h({t}, SchedulingPolicy::FP, 0.0001);
    h.run_until(0.0095);
    CHECK(h.node->stats()[0].completed == 1);
    CHECK(h.node->stats()[0].max_response == doctest::Approx(0.0011).epsilon(1e-12));
}

TEST_CASE("a job released exactly at another's completion does not inflate its response") {
    double tick = testutil::kTick;
    // a completes exactly when b releases (t = 2 ticks).
    TaskSpec a = make_task("a", 2 * tick, 64 * tick, 64 * tick, 2);
    TaskSpec b = make_task("b", 1 * tick, 64 * tick, 64 * tick, 1);
    b.first_release = 2 * tick;
    KernelHarness h({a, b}, SchedulingPolicy::FP);
    h.run_until(10 * tick);
    CHECK(h.node->stats()[0].max_response == 2 * tick);
    CHECK(h.node->stats()[1].max_response == 1 * tick);
}

TEST_CASE("positive drift releases early in nominal time") {
    // Local period p maps to p / (1 + drift) nominal seconds.
    ClockModel clock{0.25, 0.0};
    KernelHarness h({make_task("a", 0.0001, 1.0, 1.0)}, SchedulingPolicy::FP, 0.0, clock);
    h.run_until(1.7);
    // Releases at local times 0, 1, 2 -> nominal 0, 0.8, 1.6.
    CHECK(h.node->stats()[0].released == 3);
}

TEST_CASE("clock offset skips releases that predate the run") {
    ClockModel clock{0.0, 2.5};
    KernelHarness h({make_task("a", 0.0001, 1.0, 1.0)}, SchedulingPolicy::FP, 0.0, clock);
    h.run_until(1.0);
    // Local time starts at 2.5, so local releases 0, 1, 2 never happen;
    // local 3 fires at nominal 0.5.
    CHECK(h.node->stats()[0].released == 1);
}

TEST_CASE("deadline misses are recorded but do not abort the job") {
    TaskSpec t = make_task("a", 0.003, 0.01, 0.002);  // always misses
    KernelHarness h({t}, SchedulingPolicy::FP);
    h.run_until(0.05);
    CHECK(h.node->stats()[0].deadline_misses == h.node->stats()[0].completed);
    CHECK(h.node->stats()[0].completed >= 4);
}

TEST_CASE("FP response-time agreement on random schedulable dyadic sets") {
    sim::RngStream rng(2718, "fp.agree");
    int checked = 0;
    while (checked < 25) {
        auto set = testutil::random_task_set(rng, 5, 0.7, false);
        auto analysis = response_time_fp(set.tasks, SchedulingPolicy::FP);
        bool schedulable = true;
        for (const auto& r : analysis) schedulable = schedulable && r.schedulable;
        if (!schedulable) continue;
        ++checked;
        KernelHarness h(set.tasks, SchedulingPolicy::FP);
        h.run_until(set.hyperperiod);
        for (std::size_t i = 0; i < set.tasks.size(); ++i) {
            CHECK(h.node->stats()[i].max_response == analysis[i].response);
            CHECK(h.node->stats()[i].deadline_misses == 0);
        }
    }
}

TEST_CASE("DM response-time agreement on random schedulable dyadic sets") {
    sim::RngStream rng(1618, "dm.agree");
    int checked = 0;
    while (checked < 15) {
        auto set = testutil::random_task_set(rng, 5, 0.65, false);
        auto analysis = response_time_fp(set.tasks, SchedulingPolicy::DM);
        bool schedulable = true;
        for (const auto& r : analysis) schedulable = schedulable && r.schedulable;
        if (!schedulable) continue;
        ++checked;
        KernelHarness h(set.tasks, SchedulingPolicy::DM);
        h.run_until(set.hyperperiod);
        for (std::size_t i = 0; i < set.tasks.size(); ++i) {
            CHECK(h.node->stats()[i].max_response == analysis[i].response);
        }
    }
}

TEST_CASE("EDF runs implicit-deadline sets with utilization <= 1 without misses") {
    sim::RngStream rng(31337, "edf.nomiss");
    for (int round = 0; round < 25; ++round) {
        auto set = testutil::random_task_set(rng, 5, 0.95, true);
        KernelHarness h(set.tasks, SchedulingPolicy::EDF);
        h.run_until(set.hyperperiod);
        for (std::size_t i = 0; i < set.tasks.size(); ++i) {
            CHECK(h.node->stats()[i].deadline_misses == 0);
        }
    }
}

TEST_CASE("DM and RM produce identical schedule traces when deadlines equal periods") {
    sim::RngStream rng(555, "dm.rm");
    for (int round = 0; round < 10; ++round) {
        auto set = testutil::random_task_set(rng, 5, 0.8, true);
        KernelHarness dm(set.tasks, SchedulingPolicy::DM);
        KernelHarness rm(set.tasks, SchedulingPolicy::RM);
        dm.run_until(set.hyperperiod);
        rm.run_until(set.hyperperiod);
        CHECK(scenario::to_csv(dm.schedule) == scenario::to_csv(rm.schedule));
    }
}

TEST_CASE("schedule traces satisfy work conservation and single-core exclusivity") {
    sim::RngStream rng(99, "conserve");
    auto set = testutil::random_task_set(rng, 5, 0.9, true);
    KernelHarness h(set.tasks, SchedulingPolicy::EDF);
    h.run_until(set.hyperperiod);

    // Replay the trace: at most one RUNNING task at any time, and whenever
    // some task is READY, another is RUNNING (the processor never idles
    // with queued work).
    std::map<std::string, std::string> state;
    std::size_t i = 0;
    bool exclusivity = true, conservation = true;
    while (i < h.schedule.size()) {
        double t = h.schedule[i].time;
        while (i < h.schedule.size() && h.schedule[i].time == t) {
            state[h.schedule[i].task] = h.schedule[i].state;
            ++i;
        }
        int running = 0, ready = 0;
        for (auto& [task, st] : state) {
            running += st == "RUNNING";
            ready += st == "READY";
        }
        exclusivity = exclusivity && running <= 1;
        conservation = conservation && (ready == 0 || running == 1);
    }
    CHECK(exclusivity);
    CHECK(conservation);
}

TEST_CASE("battery depletion aborts jobs and suppresses future releases") {
    TaskSpec t = make_task("a", 0.001, 0.01, 0.01);
    KernelHarness h({t}, SchedulingPolicy::FP, 0.0, {}, 1.0 /* joules */);
    h.node->start();
    // Drain 0.02 J fifty times: remaining hits exactly zero.
    int drains = 0;
    while (auto d = h.queue.advance_until(0.5)) {
        d->action(d->event);
        if (h.queue.now() >= 0.1 && drains < 50) {
            h.node->consume_energy(0.02, h.queue.now());
            ++drains;
        }
    }
    CHECK(drains == 50);
    CHECK_FALSE(h.node->powered());
    CHECK(h.node->battery()->remaining == 0.0);

    double t_dep = -1.0;
    for (auto& [kind, when] : h.events) {
        if (kind == "battery_depleted") t_dep = when;
    }
    REQUIRE(t_dep >= 0.0);
    // Releases happened at 0, 0.01, ... up to the depletion instant and then
    // stopped; without the battery the 0.5 s run would have released 51.
    auto expected = static_cast<std::uint64_t>(t_dep / 0.01) + 1;
    CHECK(h.node->stats()[0].released == expected);
    CHECK(h.node->stats()[0].released < 51);
}

TEST_CASE("consume_energy floors at zero") {
    KernelHarness h({make_task("a", 0.001, 0.01, 0.01)}, SchedulingPolicy::FP, 0.0, {}, 1.0);
    h.node->start();
    while (auto d = h.queue.advance_until(0.001)) d->action(d->event);
    h.node->consume_energy(0.0, 0.001);
    CHECK(h.node->battery()->remaining == 1.0);
    h.node->consume_energy(2.0, 0.001);
    CHECK(h.node->battery()->remaining == 0.0);
    while (auto d = h.queue.advance_until(0.002)) d->action(d->event);
    CHECK_FALSE(h.node->powered());
}

TEST_CASE("messages release the registered handler in order") {
    TaskSpec handler;
    handler.name = "h";
    handler.periodic = false;
    handler.rel_deadline = 0.01;
    handler.exec_time = ExecTimeModel::make_constant(0.001);
    KernelHarness h({handler}, SchedulingPolicy::FP);
    h.node->register_handler(1, 0);
    h.node->start();
    h.node->deliver(1, Message{1.5, 9, 1, 0.0, 0.0}, 0.0);
    h.node->deliver(1, Message{2.5, 9, 1, 0.0, 0.0}, 0.0);
    while (auto d = h.queue.advance_until(0.01)) d->action(d->event);
    CHECK(h.node->stats()[0].completed == 2);
    auto m1 = h.node->pop_message();
    auto m2 = h.node->pop_message();
    REQUIRE(m1.has_value());
    REQUIRE(m2.has_value());
    CHECK(m1->value == 1.5);  // FIFO order
    CHECK(m2->value == 2.5);
    CHECK_FALSE(h.node->pop_message().has_value());
}

TEST_CASE("delivery to a powered-off node is dropped with a trace record") {
    TaskSpec handler;
    handler.name = "h";
    handler.periodic = false;
    handler.rel_deadline = 0.01;
    handler.exec_time = ExecTimeModel::make_constant(0.001);
    KernelHarness h({handler}, SchedulingPolicy::FP, 0.0, {}, 0.5);
    h.node->register_handler(1, 0);
    h.node->start();
    h.node->consume_energy(0.5, 0.0);  // drains to zero
    while (auto d = h.queue.advance_until(0.001)) d->action(d->event);
    REQUIRE_FALSE(h.node->powered());
    h.node->deliver(1, Message{1.0, 0, 1, 0.0, 0.001}, 0.001);
    CHECK(h.node->stats()[0].released == 0);
    bool dropped = false;
    for (auto& [kind, when] : h.events) dropped = dropped || kind == "drop_node_off";
    CHECK(dropped);
}

TEST_CASE("delivery to an unregistered network leaves a record, no job") {
    KernelHarness h({make_task("a", 0.001, 0.01, 0.01)}, SchedulingPolicy::FP);
    h.node->start();
    h.node->deliver(42, Message{1.0, 0, 42, 0.0, 0.0}, 0.0);
    bool recorded = false;
    for (auto& [kind, when] : h.events) recorded = recorded || kind == "no_handler";
    CHECK(recorded);
}

}  // TEST_SUITE
