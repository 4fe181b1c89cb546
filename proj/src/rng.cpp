#include "amf/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace amf {
namespace {

// splitmix64, used only to spread (seed, stream_id) into engine seeds so that
// nearby stream ids do not produce correlated engines.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : gen_(mix64(mix64(seed) ^ mix64(stream_id * 0xda942042e4dd58b5ULL + 1))) {}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::uniform_open01() {
    // 53 high bits shifted into (0,1): ((k + 0.5) / 2^53) with k in [0, 2^53).
    const std::uint64_t k = next_u64() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("RngStream::uniform: empty interval");
    return lo + uniform_open01() * (hi - lo);
}

double RngStream::exponential(double rate) {
    const double u = uniform_open01();
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(u) / rate;
}

double RngStream::normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform_open01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643 * u2);
}

}  // namespace amf
