#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "chronosim/delay_model.hpp"
#include "doctest.h"

using namespace chronosim;
using namespace chronosim::net;

namespace {

DelaySampler sampler(DelayModel m, const char* stream = "test.delay") {
    return DelaySampler(std::move(m), sim::RngStream(1234, stream));
}

// Kolmogorov-Smirnov distance between samples and a model CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

}  // namespace

TEST_SUITE("delay_model") {

TEST_CASE("constant model returns its delay") {
    auto s = sampler(DelayModel::make_constant(0.002));
    for (int i = 0; i < 10; ++i) CHECK(s.sample() == 0.002);
}

TEST_CASE("uniform model respects its range") {
    auto s = sampler(DelayModel::make_uniform(0.001, 0.003));
    for (int i = 0; i < 1000; ++i) {
        double v = s.sample();
        CHECK(v >= 0.001);
        CHECK(v < 0.003);
    }
}

TEST_CASE("markov chain reaches its stationary bad-state fraction") {
    // Stationary P(bad) = p_gb / (p_gb + p_bg) = 0.1 / 0.6 = 1/6. The chain
    // is autocorrelated, so the binomial variance is inflated by
    // (1 + lambda) / (1 - lambda) with lambda = 1 - p_gb - p_bg.
    const double p_gb = 0.1, p_bg = 0.5;
    auto s = sampler(DelayModel::make_markov(p_gb, p_bg, 0.001, 0.01));
    const int n = 60000;
    int bad = 0;
    for (int i = 0; i < n; ++i) bad += s.sample() == 0.01;
    double pi_bad = p_gb / (p_gb + p_bg);
    double lambda = 1.0 - p_gb - p_bg;
    double sigma = std::sqrt(pi_bad * (1 - pi_bad) / n * (1 + lambda) / (1 - lambda));
    CHECK(std::abs(static_cast<double>(bad) / n - pi_bad) < 3.0 * sigma);
}

TEST_CASE("empirical histogram matches its CDF under the KS bound") {
    // alpha = 0.01 critical value: 1.628 / sqrt(N).
    DelayModel m = DelayModel::make_empirical({0.001, 0.002, 0.005, 0.010}, {0.5, 0.3, 0.2});
    auto s = sampler(m, "ks.empirical");
    const int n = 10000;
    std::vector<double> samples;
    for (int i = 0; i < n; ++i) samples.push_back(s.sample());
    auto cdf = [&](double x) {
        double acc = 0.0;
        for (std::size_t b = 0; b + 1 < m.bin_edges.size(); ++b) {
            double lo = m.bin_edges[b], hi = m.bin_edges[b + 1];
            if (x >= hi) {
                acc += m.bin_probs[b];
            } else if (x > lo) {
                acc += m.bin_probs[b] * (x - lo) / (hi - lo);
            }
        }
        return acc;
    };
    CHECK(ks_distance(samples, cdf) < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform delay matches its CDF under the KS bound") {
    auto s = sampler(DelayModel::make_uniform(0.002, 0.006), "ks.uniform");
    const int n = 10000;
    std::vector<double> samples;
    for (int i = 0; i < n; ++i) samples.push_back(s.sample());
    auto cdf = [](double x) { return std::clamp((x - 0.002) / 0.004, 0.0, 1.0); };
    CHECK(ks_distance(samples, cdf) < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("validation rejects bad parameters") {
    CHECK_THROWS_AS(DelayModel::make_constant(-0.001).validate(), ValidationError);
    CHECK_THROWS_AS(DelayModel::make_uniform(0.01, 0.001).validate(), ValidationError);
    CHECK_THROWS_AS(DelayModel::make_empirical({0.001, 0.002}, {0.9}).validate(),
                    ValidationError);  // probs sum != 1
    CHECK_THROWS_AS(DelayModel::make_markov(1.5, 0.5, 0.001, 0.01).validate(), ValidationError);
    CHECK_NOTHROW(DelayModel::make_empirical({0.0, 1.0}, {1.0 + 5e-10}).validate());
}

TEST_CASE("CLI syntax parser round-trips the model kinds") {
    CHECK(parse_delay_model("constant:0.002").constant == 0.002);
    auto u = parse_delay_model("uniform:0.001,0.003");
    CHECK(u.lo == 0.001);
    CHECK(u.hi == 0.003);
    auto mk = parse_delay_model("markov:0.1,0.5,0.001,0.01");
    CHECK(mk.p_gb == 0.1);
    CHECK(mk.delay_bad == 0.01);
    auto e = parse_delay_model("empirical:0.001,0.002,0.005;0.7,0.3");
    CHECK(e.bin_edges.size() == 3);
    CHECK(e.bin_probs.size() == 2);
    CHECK_THROWS_AS(parse_delay_model("nonsense:1"), ValidationError);
}

}  // TEST_SUITE
