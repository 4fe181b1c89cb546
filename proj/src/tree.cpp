#include "amf/tree.hpp"

#include <stdexcept>

namespace amf {

MondrianTree::MondrianTree(int dim, Task task, int n_classes)
    : dim_(dim), task_(task), n_classes_(n_classes) {
    if (dim < 1) throw std::invalid_argument("MondrianTree: dimension must be positive");
    if (task == Task::classification && n_classes < 2)
        throw std::invalid_argument("MondrianTree: classification needs at least two classes");
    root_ = fresh_node();
}

NodeId MondrianTree::fresh_node() {
    NodeRecord rec;
    rec.range_low.assign(static_cast<std::size_t>(dim_), std::numeric_limits<double>::infinity());
    rec.range_high.assign(static_cast<std::size_t>(dim_), -std::numeric_limits<double>::infinity());
    nodes_.push_back(std::move(rec));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId MondrianTree::leaf_containing(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("leaf_containing: dimension mismatch");
    NodeId id = root_;
    while (!nodes_[id].is_leaf()) {
        const NodeRecord& rec = nodes_[id];
        id = (x[static_cast<std::size_t>(rec.split_dim)] <= rec.split_threshold) ? rec.left
                                                                                 : rec.right;
    }
    return id;
}

std::size_t MondrianTree::depth_of(NodeId id) const {
    if (id >= nodes_.size()) throw std::invalid_argument("depth_of: no such node");
    std::size_t d = 0;
    while (nodes_[id].parent != kNoNode) {
        id = nodes_[id].parent;
        ++d;
    }
    return d;
}

std::size_t MondrianTree::leaf_count() const {
    std::size_t n = 0;
    for (const NodeRecord& rec : nodes_)
        if (rec.is_leaf()) ++n;
    return n;
}

void MondrianTree::extend_range(NodeId id, std::span<const double> x) {
    NodeRecord& rec = nodes_[id];
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < rec.range_low[j]) rec.range_low[j] = x[j];
        if (x[j] > rec.range_high[j]) rec.range_high[j] = x[j];
    }
}

std::pair<NodeId, NodeId> MondrianTree::insert_internal_above(NodeId node, int split_dim,
                                                              double threshold,
                                                              double event_time, Side side) {
    if (node >= nodes_.size()) throw std::invalid_argument("insert_internal_above: no such node");
    if (split_dim < 0 || split_dim >= dim_)
        throw std::invalid_argument("insert_internal_above: split dimension out of range");
    const NodeId old_parent = nodes_[node].parent;
    if (old_parent != kNoNode) {
        const NodeRecord& par = nodes_[old_parent];
        if (par.left != node && par.right != node)
            throw std::invalid_argument("insert_internal_above: node is detached");
    } else if (node != root_) {
        throw std::invalid_argument("insert_internal_above: node is detached");
    }
    if (!(event_time > nodes_[node].birth_time))
        throw std::invalid_argument("insert_internal_above: event time not after node's birth");
    if (!nodes_[node].is_leaf() && !(event_time < nodes_[nodes_[node].left].birth_time))
        throw std::invalid_argument("insert_internal_above: event time not before children's birth");

    const NodeId internal = fresh_node();
    const NodeId leaf = fresh_node();

    // The new internal node stands where `node` stood: same cell, same birth,
    // same history. Its forecaster state and weights are therefore copies.
    NodeRecord& in = nodes_[internal];
    const NodeRecord& displaced = nodes_[node];
    in.parent = old_parent;
    in.split_dim = split_dim;
    in.split_threshold = threshold;
    in.birth_time = displaced.birth_time;
    in.range_low = displaced.range_low;
    in.range_high = displaced.range_high;
    in.log_weight = displaced.log_weight;
    in.log_avg_weight = displaced.log_avg_weight;
    in.stats = displaced.stats;
    if (side == Side::left) {
        in.left = leaf;
        in.right = node;
    } else {
        in.left = node;
        in.right = leaf;
    }

    // Both children of the new split are born at the event time; the
    // displaced subtree keeps everything else (split, weights, stats, range).
    nodes_[node].parent = internal;
    nodes_[node].birth_time = event_time;
    nodes_[leaf].parent = internal;
    nodes_[leaf].birth_time = event_time;

    if (old_parent == kNoNode) {
        root_ = internal;
    } else {
        NodeRecord& par = nodes_[old_parent];
        if (par.left == node)
            par.left = internal;
        else
            par.right = internal;
    }
    return {internal, leaf};
}

}  // namespace amf
