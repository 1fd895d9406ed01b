#include "chronosim/rng.hpp"

#include <cmath>

namespace chronosim::sim {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t RngStream::mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

std::uint64_t RngStream::fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

RngStream::RngStream(std::uint64_t root_seed, std::string_view stream_id)
    : root_seed_(root_seed),
      stream_id_(stream_id),
      key_(mix64(root_seed ^ mix64(fnv1a64(stream_id)))) {}

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    if (lo > hi) {
        throw BadIntervalError("uniform interval with lo > hi: [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + ")");
    }
    if (lo == hi) return lo;
    double v = lo + next_double() * (hi - lo);
    if (v >= hi) v = std::nextafter(hi, lo);
    return v;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
    if (n <= 1) return 0;
    return next_u64() % n;
}

bool RngStream::bernoulli(double p) {
    return next_double() < p;
}

}  // namespace chronosim::sim
