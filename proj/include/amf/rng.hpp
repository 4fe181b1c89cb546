#pragma once

#include <cstdint>
#include <random>

namespace amf {

// Deterministic random stream addressed by (seed, stream_id). Identical
// (seed, stream_id, call sequence) yields identical draws on every platform:
// the engine is the fully specified std::mt19937_64 and all real-valued draws
// are derived from raw 64-bit words, never from distribution objects whose
// output is implementation defined.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform_open01();

    // Uniform on the open interval (lo, hi). Requires lo < hi.
    double uniform(double lo, double hi);

    // Inverse-CDF exponential with the given rate. A non-positive rate means
    // the event never happens: returns +infinity. One uniform draw is
    // consumed either way so call parity does not depend on the rate.
    double exponential(double rate);

    // Standard normal via Box-Muller (two uniform draws).
    double normal();

private:
    std::mt19937_64 gen_;
};

}  // namespace amf
