#include "chronosim/delay_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "chronosim/errors.hpp"

namespace chronosim::net {

DelayModel DelayModel::make_constant(double d) {
    DelayModel m;
    m.kind = Kind::Constant;
    m.constant = d;
    return m;
}

DelayModel DelayModel::make_uniform(double lo, double hi) {
    DelayModel m;
    m.kind = Kind::Uniform;
    m.lo = lo;
    m.hi = hi;
    return m;
}

DelayModel DelayModel::make_empirical(std::vector<double> edges, std::vector<double> probs) {
    DelayModel m;
    m.kind = Kind::Empirical;
    m.bin_edges = std::move(edges);
    m.bin_probs = std::move(probs);
    return m;
}

DelayModel DelayModel::make_markov(double p_gb, double p_bg, double d_good, double d_bad) {
    DelayModel m;
    m.kind = Kind::Markov2State;
    m.p_gb = p_gb;
    m.p_bg = p_bg;
    m.delay_good = d_good;
    m.delay_bad = d_bad;
    return m;
}

const char* DelayModel::kind_name() const {
    switch (kind) {
        case Kind::Constant: return "constant";
        case Kind::Uniform: return "uniform";
        case Kind::Empirical: return "empirical";
        case Kind::Markov2State: return "markov";
    }
    return "?";
}

void DelayModel::validate() const {
    switch (kind) {
        case Kind::Constant:
            if (constant < 0.0) throw ValidationError("BadParameter", "constant delay < 0");
            break;
        case Kind::Uniform:
            if (lo < 0.0 || hi < lo) {
                throw ValidationError("BadParameter", "uniform delay needs 0 <= lo <= hi");
            }
            break;
        case Kind::Empirical: {
            if (bin_edges.size() < 2 || bin_probs.size() + 1 != bin_edges.size()) {
                throw ValidationError("BadParameter",
                                      "empirical delay needs n+1 bin edges and n probabilities");
            }
            for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) {
                if (bin_edges[i + 1] < bin_edges[i]) {
                    throw ValidationError("BadParameter", "empirical bin edges must be sorted");
                }
            }
            if (bin_edges.front() < 0.0) {
                throw ValidationError("BadParameter", "empirical delays must be >= 0");
            }
            double sum = 0.0;
            for (double p : bin_probs) {
                if (p < 0.0) throw ValidationError("BadParameter", "negative bin probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                throw ValidationError("BadParameter", "empirical probabilities must sum to 1");
            }
            break;
        }
        case Kind::Markov2State:
            if (p_gb < 0.0 || p_gb > 1.0 || p_bg < 0.0 || p_bg > 1.0) {
                throw ValidationError("BadParameter", "markov transition probabilities in [0,1]");
            }
            if (delay_good < 0.0 || delay_bad < 0.0) {
                throw ValidationError("BadParameter", "markov delays must be >= 0");
            }
            break;
    }
}

double DelaySampler::sample() {
    switch (model_.kind) {
        case DelayModel::Kind::Constant:
            return model_.constant;
        case DelayModel::Kind::Uniform:
            return rng_.uniform(model_.lo, model_.hi);
        case DelayModel::Kind::Empirical: {
            double u = rng_.next_double();
            double acc = 0.0;
            std::size_t bin = model_.bin_probs.size() - 1;
            for (std::size_t i = 0; i < model_.bin_probs.size(); ++i) {
                acc += model_.bin_probs[i];
                if (u < acc) {
                    bin = i;
                    break;
                }
            }
            return rng_.uniform(model_.bin_edges[bin], model_.bin_edges[bin + 1]);
        }
        case DelayModel::Kind::Markov2State: {
            // Advance the hidden state, then emit the new state's delay.
            double u = rng_.next_double();
            if (bad_state_) {
                if (u < model_.p_bg) bad_state_ = false;
            } else {
                if (u < model_.p_gb) bad_state_ = true;
            }
            return bad_state_ ? model_.delay_bad : model_.delay_good;
        }
    }
    return 0.0;
}

namespace {

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

DelayModel parse_delay_model(const std::string& text) {
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    DelayModel m;
    try {
        if (kind == "constant") {
            m = DelayModel::make_constant(std::stod(args));
        } else if (kind == "uniform") {
            auto v = parse_number_list(args);
            if (v.size() != 2) throw std::invalid_argument("uniform needs lo,hi");
            m = DelayModel::make_uniform(v[0], v[1]);
        } else if (kind == "markov") {
            auto v = parse_number_list(args);
            if (v.size() != 4) throw std::invalid_argument("markov needs p_gb,p_bg,d_good,d_bad");
            m = DelayModel::make_markov(v[0], v[1], v[2], v[3]);
        } else if (kind == "empirical") {
            auto semi = args.find(';');
            if (semi == std::string::npos) {
                throw std::invalid_argument("empirical needs edges;probs");
            }
            m = DelayModel::make_empirical(parse_number_list(args.substr(0, semi)),
                                           parse_number_list(args.substr(semi + 1)));
        } else {
            throw std::invalid_argument("unknown delay model kind '" + kind + "'");
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError("BadParameter", "cannot parse delay model '" + text + "': " + e.what());
    }
    m.validate();
    return m;
}

}  // namespace chronosim::net
