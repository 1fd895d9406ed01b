#include "chronosim/response_time.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace chronosim;
using namespace chronosim::kernel;

TEST_SUITE("response_time") {

TEST_CASE("single task has no interference") {
    std::vector<TaskSpec> ts{testutil::make_task("a", 1.0, 4.0, 4.0, 1)};
    auto r = response_time_fp(ts);
    REQUIRE(r.size() == 1);
    CHECK(r[0].schedulable);
    CHECK(r[0].response == 1.0);
}

TEST_CASE("two-task fixed point") {
    // Hand iteration: R = 2; R = 2 + ceil(2/4)*1 = 3; R = 2 + ceil(3/4)*1 = 3.
    std::vector<TaskSpec> ts{testutil::make_task("hi", 1.0, 4.0, 4.0, 1),
                             testutil::make_task("lo", 2.0, 6.0, 6.0, 2)};
    auto r = response_time_fp(ts);
    CHECK(r[0].schedulable);
    CHECK(r[0].response == 1.0);
    CHECK(r[1].schedulable);
    CHECK(r[1].response == 3.0);

    // Cross-check by simulating one hyperperiod (12) and comparing maxima.
    testutil::KernelHarness sim(ts, SchedulingPolicy::FP);
    sim.run_until(12.0);
    CHECK(sim.node->stats()[0].max_response == 1.0);
    CHECK(sim.node->stats()[1].max_response == 3.0);
    CHECK(sim.node->stats()[0].deadline_misses == 0);
    CHECK(sim.node->stats()[1].deadline_misses == 0);
}

TEST_CASE("overload reports the low task divergent") {
    // Utilization 3/4 + 2/6 > 1: the demand iterate exceeds the deadline.
    std::vector<TaskSpec> ts{testutil::make_task("hi", 3.0, 4.0, 4.0, 1),
                             testutil::make_task("lo", 2.0, 6.0, 6.0, 2)};
    auto r = response_time_fp(ts);
    CHECK(r[0].schedulable);
    CHECK_FALSE(r[1].schedulable);

    // The hyperperiod simulation shows an actual deadline miss.
    testutil::KernelHarness sim(ts, SchedulingPolicy::FP);
    sim.run_until(12.0);
    CHECK(sim.node->stats()[1].deadline_misses > 0);
}

TEST_CASE("priority order follows the policy") {
    // Same set, DM priorities inverted relative to FP ones.
    std::vector<TaskSpec> ts{testutil::make_task("a", 1.0, 8.0, 2.0, 2),
                             testutil::make_task("b", 1.0, 8.0, 8.0, 1)};
    auto fp = response_time_fp(ts, SchedulingPolicy::FP);
    CHECK(fp[1].response == 1.0);  // b is FP-highest
    CHECK(fp[0].response == 2.0);
    auto dm = response_time_fp(ts, SchedulingPolicy::DM);
    CHECK(dm[0].response == 1.0);  // a is DM-highest
    CHECK(dm[1].response == 2.0);
}

TEST_CASE("EDF policy is rejected") {
    std::vector<TaskSpec> ts{testutil::make_task("a", 1.0, 4.0, 4.0, 1)};
    CHECK_THROWS_AS(response_time_fp(ts, SchedulingPolicy::EDF), ValidationError);
}

}  // TEST_SUITE
