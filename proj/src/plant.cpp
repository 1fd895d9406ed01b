#include "chronosim/plant.hpp"

#include <cmath>

namespace chronosim::plant {

namespace {

// dest = A*x + B*u for row-major A (n x n) and B (n x m).
void derivative(const LtiPlant& p, const std::vector<double>& x, std::vector<double>& dest) {
    for (std::size_t i = 0; i < p.n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < p.n; ++j) acc += p.A[i * p.n + j] * x[j];
        for (std::size_t j = 0; j < p.m; ++j) acc += p.B[i * p.m + j] * p.u_hold[j];
        dest[i] = acc;
    }
}

}  // namespace

LtiPlant LtiPlant::make(std::size_t n, std::size_t m, std::size_t p, std::vector<double> A,
                        std::vector<double> B, std::vector<double> C, std::vector<double> D,
                        std::vector<double> x0) {
    if (A.size() != n * n || B.size() != n * m || C.size() != p * n || D.size() != p * m ||
        x0.size() != n) {
        throw ValidationError("BadParameter", "inconsistent LTI matrix dimensions");
    }
    LtiPlant out;
    out.n = n;
    out.m = m;
    out.p = p;
    out.A = std::move(A);
    out.B = std::move(B);
    out.C = std::move(C);
    out.D = std::move(D);
    out.x = std::move(x0);
    out.u_hold.assign(m, 0.0);
    return out;
}

std::vector<double> LtiPlant::output() const {
    std::vector<double> y(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += C[i * n + j] * x[j];
        for (std::size_t j = 0; j < m; ++j) acc += D[i * m + j] * u_hold[j];
        y[i] = acc;
    }
    return y;
}

void LtiPlant::rk4_step(double h) {
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    derivative(*this, x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    derivative(*this, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    derivative(*this, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    derivative(*this, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (double v : x) {
        if (!std::isfinite(v) || std::abs(v) > 1e12) {
            throw DivergedError("plant state diverged");
        }
    }
}

LtiPlant dc_servo_plant(double a, double b) {
    return LtiPlant::make(2, 1, 1, {0.0, 1.0, 0.0, -a}, {0.0, b}, {1.0, 0.0}, {0.0},
                          {0.0, 0.0});
}

double ReferenceSignal::eval(double t) const {
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::Step:
            return t >= at ? value : 0.0;
        case Kind::Square: {
            auto half = static_cast<long long>(std::floor(2.0 * t / square_period));
            return (half % 2 == 0) ? value : -value;
        }
    }
    return 0.0;
}

double quadratic_cost(const std::vector<double>& times, const std::vector<double>& reference,
                      const std::vector<double>& output) {
    if (times.size() != reference.size() || times.size() != output.size()) {
        throw GridMismatchError("cost traces must share one sampling grid");
    }
    double j = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        double e0 = output[i - 1] - reference[i - 1];
        double e1 = output[i] - reference[i];
        j += 0.5 * (e0 * e0 + e1 * e1) * (times[i] - times[i - 1]);
    }
    return j;
}

void PlantSim::advance_to(double t) {
    while (t_ < t) {
        double remaining = t - t_;
        if (remaining >= h_int_) {
            plant_.rk4_step(h_int_);
            t_ += h_int_;
        } else {
            plant_.rk4_step(remaining);
            t_ = t;
        }
    }
}

double PlantSim::sample(std::size_t port, double t) {
    advance_to(t);
    return plant_.output().at(port);
}

void PlantSim::actuate(std::size_t port, double value, double t) {
    if (!std::isfinite(value)) throw NonFiniteError("actuation value is not finite");
    advance_to(t);
    plant_.u_hold.at(port) = value;
}

}  // namespace chronosim::plant
