#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "chronosim/errors.hpp"

namespace chronosim::sim {

// Deterministic, platform-stable random substream.
//
// Generator: SplitMix64 evaluated as a counter-based bijection,
//   out_n = mix64(key + (n+1) * 0x9E3779B97F4A7C15)
// with the stream key derived as
//   key = mix64(root_seed ^ mix64(fnv1a64(stream_id))).
// The algorithm is fixed so that identical (root_seed, stream_id) pairs
// reproduce identical sample sequences on any platform, and distinct
// stream ids give statistically independent substreams.
class RngStream {
public:
    RngStream() : RngStream(0, "") {}
    RngStream(std::uint64_t root_seed, std::string_view stream_id);

    std::uint64_t next_u64();

    // Uniform double in [0, 1), 53-bit resolution.
    double next_double();

    // Uniform in [lo, hi); returns lo exactly when lo == hi.
    // Throws BadIntervalError if lo > hi.
    double uniform(double lo, double hi);

    // Uniform integer in [0, n); n == 0 yields 0.
    std::uint64_t uniform_int(std::uint64_t n);

    bool bernoulli(double p);

    const std::string& stream_id() const { return stream_id_; }
    std::uint64_t root_seed() const { return root_seed_; }

    static std::uint64_t mix64(std::uint64_t z);
    static std::uint64_t fnv1a64(std::string_view s);

private:
    std::uint64_t root_seed_;
    std::string stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace chronosim::sim
