#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "amf/tree.hpp"

namespace amf {

// log(exp(a) + exp(b)) without leaving the log domain.
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

inline constexpr double kLog2 = 0.6931471805599453094172321;

// log of (w/2 + avg0*avg1/2), the subtree-average weight of an internal node.
inline double log_half_sum(double log_w, double log_avg0, double log_avg1) {
    return log_add_exp(log_w - kLog2, log_avg0 + log_avg1 - kLog2);
}

// A split that a prediction pretends to insert above `host` without touching
// the stored tree. The virtual leaf (fresh stats, unit weights) sits on
// `side`; the subtree rooted at host keeps its stored state on the other
// side. `birth` must fall between host's birth and its children's.
struct VirtualSplit {
    NodeId host = kNoNode;
    double birth = 0.0;
    int split_dim = -1;
    double threshold = 0.0;
    Side side = Side::left;
};

// Exponential-weights bookkeeping for one observed sample. Walks from `leaf`
// to the root; at each node, in order: log_weight accumulates -eta * loss of
// the node's own forecast (made from its stats before this sample), the
// averaged weight is recomputed (equal to log_weight at leaves), and the
// stats absorb y. Nodes off the path are untouched. Returns the path length
// in nodes. eta must be positive.
std::size_t update_weights_upward(MondrianTree& tree, NodeId leaf, double y, double eta,
                                  const LossKind& kind);

// Aggregated prediction over all prunings of the stored tree (exponential
// weights with a branching-process prior, computed by the leaf-to-root
// recursion). With a virtual split the recursion runs on the virtually
// extended tree: the virtual leaf predicts `prior_prediction` with unit
// weight and the displaced subtree contributes its stored averaged weight;
// averaged weights along the path are carried on the fly, so the stored tree
// is never written and the output is an exact convex combination either way.
std::vector<double> predict_aggregated(const MondrianTree& tree, std::span<const double> x,
                                       const std::optional<VirtualSplit>& virtual_split,
                                       std::span<const double> prior_prediction);

// Aggregated prediction when a temporary extension splits the leaf holding x
// `chain_splits` times before separating it from the stored point (the
// unrestricted variant's virtual update). Every chain cell reuses the leaf's
// forecast and weight, empty siblings carry unit weight, and the final
// virtual leaf predicts the prior. chain_splits == 0 is the plain recursion.
std::vector<double> predict_aggregated_chain(const MondrianTree& tree,
                                             std::span<const double> x, std::size_t chain_splits,
                                             std::span<const double> prior_prediction);

// Same recursion with every node's forecast replaced by its depth: the
// pruning-averaged depth of the leaf containing x. 0 on a root-only tree.
double weighted_depth(const MondrianTree& tree, std::span<const double> x);

}  // namespace amf
