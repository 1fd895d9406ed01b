#include <cmath>
#include <vector>

#include "chronosim/plant.hpp"
#include "chronosim/rng.hpp"
#include "doctest.h"

using namespace chronosim;
using namespace chronosim::plant;

TEST_SUITE("plant") {

TEST_CASE("zero dynamics keep the state") {
    LtiPlant p = LtiPlant::make(2, 1, 2, {0, 0, 0, 0}, {0, 0}, {1, 0, 0, 1}, {0, 0},
                                {3.5, -1.25});
    p.rk4_step(0.1);
    CHECK(p.x[0] == 3.5);
    CHECK(p.x[1] == -1.25);
}

TEST_CASE("one RK4 step of xdot = -x matches the exponential to 1e-7") {
    LtiPlant p = LtiPlant::make(1, 1, 1, {-1.0}, {0.0}, {1.0}, {0.0}, {1.0});
    p.rk4_step(0.1);
    CHECK(std::abs(p.x[0] - std::exp(-0.1)) < 1e-7);
    CHECK(p.x[0] == doctest::Approx(0.90483750).epsilon(1e-8));
}

TEST_CASE("halving the step reduces the global error ~16x (4th order)") {
    auto integrate = [](double h) {
        LtiPlant p = LtiPlant::make(1, 1, 1, {-1.0}, {0.0}, {1.0}, {0.0}, {1.0});
        int steps = static_cast<int>(std::round(1.0 / h));
        for (int i = 0; i < steps; ++i) p.rk4_step(h);
        return std::abs(p.x[0] - std::exp(-1.0));
    };
    double ratio = integrate(0.1) / integrate(0.05);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("double integrator under unit input is exact for RK4") {
    // x1' = x2, x2' = u: position after 1 s from rest is exactly 0.5.
    LtiPlant p = LtiPlant::make(2, 1, 1, {0, 1, 0, 0}, {0, 1}, {1, 0}, {0}, {0, 0});
    p.u_hold[0] = 1.0;
    for (int i = 0; i < 100; ++i) p.rk4_step(0.01);
    CHECK(std::abs(p.x[0] - 0.5) < 1e-9);
}

TEST_CASE("divergence detection trips on unstable dynamics") {
    LtiPlant p = LtiPlant::make(1, 1, 1, {50.0}, {0.0}, {1.0}, {0.0}, {1.0});
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 100000; ++i) p.rk4_step(0.1);
        }(),
        DivergedError);
}

TEST_CASE("dc servo: velocity converges to b/a under a unit step") {
    LtiPlant servo = dc_servo_plant(1.0, 1000.0);
    servo.u_hold[0] = 1.0;
    for (int i = 0; i < 20000; ++i) servo.rk4_step(0.001);
    CHECK(servo.x[1] == doctest::Approx(1000.0).epsilon(1e-6));
}

TEST_CASE("dc servo: zero input from the origin stays at the origin") {
    LtiPlant servo = dc_servo_plant();
    for (int i = 0; i < 100; ++i) servo.rk4_step(0.001);
    CHECK(servo.x[0] == 0.0);
    CHECK(servo.x[1] == 0.0);
}

TEST_CASE("dc servo: position equals the quadrature of velocity") {
    LtiPlant servo = dc_servo_plant(1.0, 1000.0);
    servo.u_hold[0] = 0.3;
    std::vector<double> vel{servo.x[1]};
    const double h = 1e-4;
    for (int i = 0; i < 5000; ++i) {
        servo.rk4_step(h);
        vel.push_back(servo.x[1]);
    }
    // Independent trapezoid quadrature of the velocity trace.
    double pos = 0.0;
    for (std::size_t i = 1; i < vel.size(); ++i) pos += 0.5 * (vel[i - 1] + vel[i]) * h;
    CHECK(std::abs(pos - servo.x[0]) < 1e-6);
}

TEST_CASE("PD law") {
    PdControl pd{2.0, 0.05, 0.01, 0.0};
    SUBCASE("zero error gives zero output") {
        CHECK(pd.step(0.0) == 0.0);
    }
    SUBCASE("Td = 0 reduces to proportional control") {
        PdControl p{2.0, 0.0, 0.01, 0.0};
        CHECK(p.step(0.7) == doctest::Approx(1.4).epsilon(1e-15));
    }
    SUBCASE("derivative term uses the backward difference") {
        pd.e_prev = 0.8;
        CHECK(pd.step(1.0) == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(pd.e_prev == 1.0);
    }
}

TEST_CASE("quadratic cost") {
    SUBCASE("perfect tracking costs zero") {
        std::vector<double> t{0, 1, 2}, r{1, 1, 1};
        CHECK(quadratic_cost(t, r, r) == 0.0);
    }
    SUBCASE("constant unit error over 2 s costs 2") {
        std::vector<double> t{0, 0.5, 1.0, 1.5, 2.0};
        std::vector<double> r(5, 1.0), y(5, 2.0);
        CHECK(quadratic_cost(t, r, y) == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("grid mismatch is rejected") {
        std::vector<double> t{0, 1}, r{0, 0}, y{0};
        CHECK_THROWS_AS(quadratic_cost(t, r, y), GridMismatchError);
    }
    SUBCASE("matches an independent quadrature on random traces") {
        sim::RngStream rng(8, "cost.oracle");
        std::vector<double> t, r, y;
        for (int i = 0; i < 1000; ++i) {
            t.push_back(i * 0.001);
            r.push_back(rng.uniform(-1.0, 1.0));
            y.push_back(rng.uniform(-1.0, 1.0));
        }
        // Second trapezoid route: integrate e^2 accumulated pairwise.
        double j2 = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            double a = (y[i - 1] - r[i - 1]) * (y[i - 1] - r[i - 1]);
            double b = (y[i] - r[i]) * (y[i] - r[i]);
            j2 += (a + b) * (t[i] - t[i - 1]) / 2.0;
        }
        double j1 = quadratic_cost(t, r, y);
        CHECK(std::abs(j1 - j2) <= 1e-12 * std::max(1.0, std::abs(j2)));
    }
}

TEST_CASE("PlantSim lands exactly on event times and holds inputs") {
    PlantSim sim(dc_servo_plant(), 1e-4);
    sim.actuate(0, 1.0, 0.0);
    double y1 = sim.sample(0, 0.01);
    CHECK(sim.time() == 0.01);
    // ZOH: input is bit-identical between actuations.
    CHECK(sim.model().u_hold[0] == 1.0);
    sim.actuate(0, -0.5, 0.0123456);  // off-grid actuation lands exactly
    CHECK(sim.time() == 0.0123456);
    CHECK(sim.model().u_hold[0] == -0.5);
    double y2 = sim.sample(0, 0.02);
    CHECK(y2 != y1);
    // Sampling twice at the same instant returns identical values.
    CHECK(sim.sample(0, 0.02) == y2);
}

TEST_CASE("actuation rejects non-finite values") {
    PlantSim sim(dc_servo_plant(), 1e-4);
    CHECK_THROWS_AS(sim.actuate(0, std::nan(""), 0.0), NonFiniteError);
}

TEST_CASE("reference signals") {
    ReferenceSignal c{ReferenceSignal::Kind::Constant, 2.0, 0.0, 1.0};
    CHECK(c.eval(0.0) == 2.0);
    CHECK(c.eval(9.9) == 2.0);
    ReferenceSignal st{ReferenceSignal::Kind::Step, 1.5, 0.25, 1.0};
    CHECK(st.eval(0.2) == 0.0);
    CHECK(st.eval(0.25) == 1.5);
    ReferenceSignal sq{ReferenceSignal::Kind::Square, 1.0, 0.0, 2.0};
    CHECK(sq.eval(0.0) == 1.0);
    CHECK(sq.eval(0.999) == 1.0);
    CHECK(sq.eval(1.0) == -1.0);
    CHECK(sq.eval(2.0) == 1.0);
}

TEST_CASE("continuous-loop oracle: frozen PD gains give <25% overshoot, <1 s settling") {
    // Closed loop of the benchmark gains (K=0.2, Td=0.09) on the default
    // servo with a continuous PD: xdot2 = -a x2 + b(K(r - x1) - K Td x2).
    const double K = 0.2, Td = 0.09, a = 1.0, b = 1000.0;
    LtiPlant loop = LtiPlant::make(2, 1, 1,
                                   {0.0, 1.0, -b * K, -(a + b * K * Td)},
                                   {0.0, b * K}, {1.0, 0.0}, {0.0}, {0.0, 0.0});
    loop.u_hold[0] = 1.0;  // unit reference
    double peak = 0.0;
    double settle_at = -1.0;
    const double h = 1e-5;
    for (int i = 1; i <= 200000; ++i) {
        loop.rk4_step(h);
        peak = std::max(peak, loop.x[0]);
        if (settle_at < 0.0 && std::abs(loop.x[0] - 1.0) <= 0.05) {
            settle_at = i * h;
        } else if (std::abs(loop.x[0] - 1.0) > 0.05) {
            settle_at = -1.0;
        }
    }
    CHECK(peak < 1.25);
    REQUIRE(settle_at > 0.0);
    CHECK(settle_at < 1.0);
}

}  // TEST_SUITE
