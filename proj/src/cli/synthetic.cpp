#include "cli/synthetic.hpp"

#include "amf/rng.hpp"

namespace amf::cli {

Stream make_gauss2(std::size_t n, std::uint64_t seed) {
    // Stream id disjoint from the forest's (0 = predictions, 1.. = trees).
    RngStream rng(seed, 0x67617573ULL);
    Stream out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = rng.uniform_open01() < 0.5 ? 0 : 1;
        const double mu = label == 0 ? 0.0 : 2.0;
        Sample s;
        s.x = {mu + 0.5 * rng.normal(), mu + 0.5 * rng.normal()};
        s.y = label;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace amf::cli
