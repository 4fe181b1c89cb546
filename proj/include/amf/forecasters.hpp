#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amf/types.hpp"

namespace amf {

// Sufficient statistics of the labels that fell in a node's cell.
// Classification keeps per-class counts; regression keeps the running sum.
struct NodeStats {
    std::vector<std::uint32_t> class_counts;
    double label_sum = 0.0;
    std::uint64_t count = 0;

    void add_class(int label, int n_classes);
    void add_value(double label);
};

enum class Loss { log_loss, quadratic };

// Loss family plus the label bound B used by the quadratic loss. B is only
// meaningful for quadratic; log-loss ignores it.
struct LossKind {
    Loss loss = Loss::log_loss;
    double bound = 1.0;

    // eta = 1 for log-loss, 1 / (8 B^2) for quadratic.
    double default_eta() const;
};

// Krichevsky-Trofimov class probabilities: (count(y) + 1/2) / (n + K/2).
// An empty node yields the uniform distribution. Requires K >= 2.
std::vector<double> kt_predict(const NodeStats& stats, int n_classes);

// Running-mean point forecast; 0 on an empty node.
double mean_predict(const NodeStats& stats);

// Instantaneous loss of a prediction against a label. For log-loss `pred`
// is a probability vector and y a class index; for quadratic `pred` is a
// single value and y a real in [-B, B].
double loss_value(const LossKind& kind, std::span<const double> pred, double y);

}  // namespace amf
