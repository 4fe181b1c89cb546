#pragma once

#include <cstdint>

#include "amf/types.hpp"

namespace amf::cli {

// Binary classification stream in the plane: fair coin label, then a draw
// from N(mu_k, 0.25 I) with mu_0 = (0, 0) and mu_1 = (2, 2). Fully
// determined by (n, seed).
Stream make_gauss2(std::size_t n, std::uint64_t seed);

}  // namespace amf::cli
