#pragma once

#include <span>
#include <vector>

#include "amf/aggregation.hpp"
#include "amf/forecasters.hpp"
#include "amf/tree.hpp"
#include "amf/types.hpp"

// Slow, independent reimplementations of the aggregation semantics, used only
// to certify the fast recursions in tests. Everything here enumerates
// prunings explicitly, so trees are guarded to at most 20 internal nodes.
namespace amf::oracle {

// A pruning of the stored tree: a subtree containing the root in which every
// node keeps either both children or none.
struct Pruning {
    std::vector<NodeId> nodes;
    std::vector<NodeId> leaves;
    std::size_t internal_in_base = 0;  // pruning nodes that are internal in the full tree
};

std::vector<Pruning> enumerate_prunings(const MondrianTree& tree);

// Branching-process prior 2^(-k) with k = internal_in_base; sums to one over
// all prunings of a tree. Rejects prunings that miss the root or break the
// keep-both-or-none closure.
double prior_mass(const Pruning& pruning, const MondrianTree& tree);

// Exact aggregated forecast at x, the slow way: every pruning carries weight
// prior * product over its leaves of exp(log_weight), accumulated in linear
// long double arithmetic, and forecasts through the pruning leaf containing x.
std::vector<double> brute_force_aggregate(const MondrianTree& tree, std::span<const double> x);

// Same aggregation with the forecast replaced by the depth of the pruning
// leaf containing x.
double brute_force_weighted_depth(const MondrianTree& tree, std::span<const double> x);

// The pruning leaf whose cell contains x.
NodeId pruning_leaf_for(const MondrianTree& tree, const Pruning& pruning,
                        std::span<const double> x);

// Cumulative prequential loss of the frozen pruning replayed over the stream:
// each pruning leaf forecasts from the labels previously routed to its cell.
double pruning_cumulative_loss(const MondrianTree& tree, const Pruning& pruning,
                               const Stream& stream, const LossKind& kind);

// Loss of the best fixed per-leaf forecast (in hindsight) for the pruning:
// empirical label entropy per cell for log-loss, per-cell mean for quadratic.
double pruning_best_constant_loss(const MondrianTree& tree, const Pruning& pruning,
                                  const Stream& stream, const LossKind& kind);

// Copy of the tree with the virtual split actually inserted (plus the range
// extension for x), so virtual predictions can be checked against the oracle.
MondrianTree materialize_virtual(const MondrianTree& tree, const VirtualSplit& vs,
                                 std::span<const double> x);

}  // namespace amf::oracle
