#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chronosim/errors.hpp"

namespace chronosim::plant {

// Continuous LTI plant x' = Ax + Bu, y = Cx + Du with a zero-order-held
// input vector. Matrices are row-major.
struct LtiPlant {
    std::size_t n = 0;  // states
    std::size_t m = 0;  // inputs
    std::size_t p = 0;  // outputs
    std::vector<double> A, B, C, D;
    std::vector<double> x;
    std::vector<double> u_hold;

    static LtiPlant make(std::size_t n, std::size_t m, std::size_t p, std::vector<double> A,
                         std::vector<double> B, std::vector<double> C, std::vector<double> D,
                         std::vector<double> x0);

    std::vector<double> output() const;  // y = Cx + Du

    // One classical 4-stage Runge-Kutta step with u held constant.
    // Throws DivergedError when any state magnitude exceeds 1e12.
    void rk4_step(double h);
};

// Benchmark servo G(s) = b / (s^2 + a s) in controllable canonical form:
// x1 = position (the measured output), x2 = velocity.
LtiPlant dc_servo_plant(double a = 1.0, double b = 1000.0);

// Discrete PD law u = K e + K (Td/h) (e - e_prev); e_prev starts at zero.
struct PdControl {
    double gain = 0.0;       // K
    double derivative_time = 0.0;  // Td, seconds
    double period = 0.0;     // h, seconds
    double e_prev = 0.0;

    double step(double e) {
        double u = gain * e + gain * (derivative_time / period) * (e - e_prev);
        e_prev = e;
        return u;
    }
};

struct ReferenceSignal {
    enum class Kind { Constant, Step, Square } kind = Kind::Constant;
    double value = 0.0;      // constant level / step level / square amplitude
    double at = 0.0;         // step time
    double square_period = 1.0;

    double eval(double t) const;
};

// J = integral of (y - r)^2 dt by the trapezoid rule over a shared grid.
// Throws GridMismatchError when the series lengths differ.
double quadratic_cost(const std::vector<double>& times, const std::vector<double>& reference,
                      const std::vector<double>& output);

// Event-driven integration wrapper: advances the plant to arbitrary event
// times with whole h_int steps plus one shorter closing step, so samples and
// hold updates land exactly on their instants with no extrapolation.
class PlantSim {
public:
    PlantSim(LtiPlant model, double h_int) : plant_(std::move(model)), h_int_(h_int) {}

    void advance_to(double t);

    // Measurement at the sampling instant; the plant is integrated in
    // lockstep up to t first.
    double sample(std::size_t port, double t);

    // Zero-order hold update at t. Throws NonFiniteError on a bad value.
    void actuate(std::size_t port, double value, double t);

    double time() const { return t_; }
    double h_int() const { return h_int_; }
    const LtiPlant& model() const { return plant_; }

private:
    LtiPlant plant_;
    double h_int_;
    double t_ = 0.0;
};

}  // namespace chronosim::plant
