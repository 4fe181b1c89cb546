#pragma once

#include <cstdint>
#include <vector>

namespace amf {

enum class Task { classification, regression };

// One labelled observation. For classification the label is the class index
// stored as a double; it must be integral and in [0, n_classes).
struct Sample {
    std::vector<double> x;
    double y = 0.0;
};

using Stream = std::vector<Sample>;

}  // namespace amf
