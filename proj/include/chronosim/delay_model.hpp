#pragma once

#include <string>
#include <vector>

#include "chronosim/rng.hpp"

namespace chronosim::net {

// Stochastic link delay. Empirical draws a histogram bin by probability and
// then uniformly within the bin. Markov2State is a two-state (good/bad)
// chain advanced once per sample, emitting the current state's delay.
struct DelayModel {
    enum class Kind { Constant, Uniform, Empirical, Markov2State } kind = Kind::Constant;

    double constant = 0.0;
    double lo = 0.0, hi = 0.0;
    std::vector<double> bin_edges;   // n+1 edges, nondecreasing, >= 0
    std::vector<double> bin_probs;   // n probabilities summing to 1 +- 1e-9
    double p_gb = 0.0, p_bg = 0.0;   // good->bad, bad->good transition probs
    double delay_good = 0.0, delay_bad = 0.0;

    static DelayModel make_constant(double d);
    static DelayModel make_uniform(double lo, double hi);
    static DelayModel make_empirical(std::vector<double> edges, std::vector<double> probs);
    static DelayModel make_markov(double p_gb, double p_bg, double d_good, double d_bad);

    // Throws ValidationError on out-of-range parameters.
    void validate() const;

    const char* kind_name() const;
};

// Stateful sampler; the Markov chain starts in the good state.
class DelaySampler {
public:
    DelaySampler(DelayModel model, sim::RngStream rng)
        : model_(std::move(model)), rng_(std::move(rng)) {}

    double sample();

    const DelayModel& model() const { return model_; }

private:
    DelayModel model_;
    sim::RngStream rng_;
    bool bad_state_ = false;
};

// Parses the CLI syntax: "constant:D", "uniform:LO,HI",
// "markov:P_GB,P_BG,D_GOOD,D_BAD", "empirical:E0,E1,...;P1,P2,...".
DelayModel parse_delay_model(const std::string& text);

}  // namespace chronosim::net
