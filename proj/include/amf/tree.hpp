#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "amf/forecasters.hpp"
#include "amf/types.hpp"

namespace amf {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class Side : int { left = 0, right = 1 };

// One node of a decision tree stored in a flat array. Links are indices into
// the owning tree's node vector, kNoNode when absent. Weights live in the log
// domain: log_weight accumulates -eta * (cumulative loss of the node's own
// forecaster), log_avg_weight is the subtree-averaged weight of the context
// tree recursion. Fresh nodes carry weight one, i.e. both logs are zero.
struct NodeRecord {
    NodeId parent = kNoNode;
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    int split_dim = -1;
    double split_threshold = 0.0;
    double birth_time = 0.0;
    std::vector<double> range_low;   // componentwise min of the points routed here
    std::vector<double> range_high;  // componentwise max; low > high means no point yet
    double log_weight = 0.0;
    double log_avg_weight = 0.0;
    NodeStats stats;

    bool is_leaf() const { return left == kNoNode; }
    std::uint64_t sample_count() const { return stats.count; }
};

// Flat-array Mondrian tree. Structure changes go through split-free range
// extension plus insert_internal_above; both keep parent/child links and the
// birth-time ordering consistent.
class MondrianTree {
public:
    // Single root leaf, birth time 0, unit weights, empty stats and range.
    MondrianTree(int dim, Task task, int n_classes = 0);

    int dim() const { return dim_; }
    Task task() const { return task_; }
    int n_classes() const { return n_classes_; }
    NodeId root() const { return root_; }
    std::size_t node_count() const { return nodes_.size(); }

    NodeRecord& node(NodeId id) { return nodes_[id]; }
    const NodeRecord& node(NodeId id) const { return nodes_[id]; }

    // Descends from the root following split_dim/split_threshold with the
    // convention x[j] <= s goes left. Requires x.size() == dim.
    NodeId leaf_containing(std::span<const double> x) const;

    // Number of edges from the root (0 for the root itself).
    std::size_t depth_of(NodeId id) const;

    std::size_t leaf_count() const;

    // Extends the node's range box to cover x.
    void extend_range(NodeId id, std::span<const double> x);

    // Inserts a new internal node at `node`'s position carrying the given
    // split. The subtree previously rooted at `node` hangs as the (1 - side)
    // child; a fresh leaf (unit weights, empty stats) is the `side` child.
    // The new internal node inherits a copy of the displaced node's record
    // (weights, stats, range, birth time) since its cell has seen exactly the
    // same samples; the displaced root and the fresh leaf are both born at
    // event_time, which must exceed the displaced node's birth time and
    // precede its children's. Returns {new_internal, new_leaf}.
    std::pair<NodeId, NodeId> insert_internal_above(NodeId node, int split_dim,
                                                    double threshold, double event_time,
                                                    Side side);

private:
    NodeId fresh_node();

    std::vector<NodeRecord> nodes_;
    NodeId root_ = 0;
    int dim_;
    Task task_;
    int n_classes_;
};

}  // namespace amf
