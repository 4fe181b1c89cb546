#pragma once

#include <optional>
#include <span>
#include <vector>

#include "amf/aggregation.hpp"
#include "amf/rng.hpp"
#include "amf/tree.hpp"

namespace amf {

// Axis-aligned box with positive (possibly zero) side lengths.
struct CellBox {
    std::vector<double> low;
    std::vector<double> high;

    // Sum of the side lengths, the rate of the Mondrian split clock.
    double linear_dim() const;
};

// Samples a Mondrian partition of `box` with lifetime lambda: every cell
// draws E ~ Exp(linear dimension) and splits at birth + E unless that exceeds
// lambda; the split dimension is chosen proportionally to side lengths and
// the threshold uniformly inside the chosen side. A degenerate box never
// splits. Expected leaf count for the unit cube is (1 + lambda)^d.
MondrianTree sample_mondrian_pruned(const CellBox& box, double lambda, RngStream& rng);

// Online extension of the partition with a point of [0,1]^d: walks to the
// leaf holding x and, if that leaf stores a different point, keeps splitting
// the full cell until the two are separated. Intermediate cells inherit the
// stored point's forecaster state; the empty siblings and the final leaf for
// x start fresh. Returns the leaf now holding x.
NodeId extend_unrestricted(MondrianTree& tree, std::span<const double> x, RngStream& rng);

// Dry run of the temporary extension a prediction would perform: the number
// of cell splits needed below the leaf holding x (0 when the leaf is empty or
// stores x itself). Consumes exactly the draws extend_unrestricted would.
std::size_t sample_virtual_chain_unrestricted(const MondrianTree& tree,
                                              std::span<const double> x, RngStream& rng);

struct RestrictedUpdate {
    NodeId leaf = kNoNode;      // leaf holding x after the update
    std::size_t created = 0;    // structurally created nodes (0 or 2)
};

// Range-based online update, the forest's default. Walks down from the root;
// at each node draws E ~ Exp(extension mass of x against the node's range
// box) and inserts a split above the node when the clock beats the existing
// children (a leaf always splits when the mass is positive). The split
// dimension is chosen proportionally to the per-dimension extension and the
// threshold uniformly inside the extension gap, so the new leaf holding x
// and the displaced subtree are always separated. When `suppress_pure_label`
// is a valid class, nodes whose samples all carry that label refuse to split
// and x is routed onward (the single-class heuristic; off by default).
RestrictedUpdate restricted_update(MondrianTree& tree, std::span<const double> x,
                                   RngStream& rng, int suppress_pure_label = -1);

// Dry run of restricted_update for predictions: same walk, same draws, no
// writes. Returns the split the update would insert, or nullopt when x lies
// inside every range box on its path.
std::optional<VirtualSplit> sample_virtual_split(const MondrianTree& tree,
                                                 std::span<const double> x, RngStream& rng);

}  // namespace amf
