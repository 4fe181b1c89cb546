#include "amf/aggregation.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace amf {
namespace {

// Running state of the upward recursion: the aggregated value of the subtree
// hanging below the current position and that subtree's averaged weight,
// recomputed on the fly so virtual extensions never have to write the tree.
struct Carry {
    std::vector<double> value;
    double log_avg = 0.0;
};

void combine(double log_weight, const std::vector<double>& node_value, double sibling_log_avg,
             Carry& carry) {
    const double log_avg = log_half_sum(log_weight, sibling_log_avg, carry.log_avg);
    double alpha = 0.5 * std::exp(log_weight - log_avg);
    alpha = std::clamp(alpha, 0.0, 1.0);
    for (std::size_t i = 0; i < carry.value.size(); ++i)
        carry.value[i] = alpha * node_value[i] + (1.0 - alpha) * carry.value[i];
    carry.log_avg = log_avg;
}

// Folds the path from `from` (exclusive) up to the root into the carry.
void climb(const MondrianTree& tree, NodeId from, Carry& carry,
           const std::function<std::vector<double>(NodeId)>& value_of) {
    NodeId child = from;
    NodeId id = tree.node(from).parent;
    while (id != kNoNode) {
        const NodeRecord& rec = tree.node(id);
        const NodeId sibling = (rec.left == child) ? rec.right : rec.left;
        combine(rec.log_weight, value_of(id), tree.node(sibling).log_avg_weight, carry);
        child = id;
        id = rec.parent;
    }
}

std::vector<double> node_forecast(const MondrianTree& tree, NodeId id) {
    const NodeRecord& rec = tree.node(id);
    if (tree.task() == Task::classification) return kt_predict(rec.stats, tree.n_classes());
    return {mean_predict(rec.stats)};
}

}  // namespace

std::size_t update_weights_upward(MondrianTree& tree, NodeId leaf, double y, double eta,
                                  const LossKind& kind) {
    if (!(eta > 0.0)) throw std::invalid_argument("update_weights_upward: eta must be positive");
    if (leaf >= tree.node_count() || !tree.node(leaf).is_leaf())
        throw std::invalid_argument("update_weights_upward: not a leaf");
    std::size_t path_len = 0;
    NodeId id = leaf;
    while (id != kNoNode) {
        NodeRecord& rec = tree.node(id);
        const std::vector<double> pred = node_forecast(tree, id);
        rec.log_weight += -eta * loss_value(kind, pred, y);
        if (rec.is_leaf())
            rec.log_avg_weight = rec.log_weight;
        else
            rec.log_avg_weight = log_half_sum(rec.log_weight, tree.node(rec.left).log_avg_weight,
                                              tree.node(rec.right).log_avg_weight);
        if (tree.task() == Task::classification) {
            const int label = static_cast<int>(y);
            if (static_cast<double>(label) != y)
                throw std::invalid_argument("update_weights_upward: non-integer class label");
            rec.stats.add_class(label, tree.n_classes());
        } else {
            rec.stats.add_value(y);
        }
        ++path_len;
        id = rec.parent;
    }
    return path_len;
}

std::vector<double> predict_aggregated(const MondrianTree& tree, std::span<const double> x,
                                       const std::optional<VirtualSplit>& virtual_split,
                                       std::span<const double> prior_prediction) {
    const std::size_t want =
        tree.task() == Task::classification ? static_cast<std::size_t>(tree.n_classes()) : 1;
    if (prior_prediction.size() != want)
        throw std::invalid_argument("predict_aggregated: prior prediction has wrong size");
    const auto value_of = [&tree](NodeId id) { return node_forecast(tree, id); };

    Carry carry;
    NodeId from;
    if (virtual_split) {
        const VirtualSplit& vs = *virtual_split;
        if (vs.host >= tree.node_count())
            throw std::invalid_argument("predict_aggregated: virtual host does not exist");
        const NodeRecord& host = tree.node(vs.host);
        if (!(vs.birth > host.birth_time) ||
            (!host.is_leaf() && !(vs.birth < tree.node(host.left).birth_time)))
            throw std::invalid_argument("predict_aggregated: virtual birth out of order");
        if (vs.split_dim < 0 || vs.split_dim >= tree.dim())
            throw std::invalid_argument("predict_aggregated: virtual split dimension out of range");
        // Virtual leaf: prior forecast, unit weights. Its sibling is the
        // displaced subtree, whose averaged weight is exactly the host's
        // stored one.
        carry.value.assign(prior_prediction.begin(), prior_prediction.end());
        carry.log_avg = 0.0;
        combine(host.log_weight, value_of(vs.host), host.log_avg_weight, carry);
        from = vs.host;
    } else {
        const NodeId leaf = tree.leaf_containing(x);
        carry.value = value_of(leaf);
        carry.log_avg = tree.node(leaf).log_avg_weight;
        from = leaf;
    }
    climb(tree, from, carry, value_of);
    return carry.value;
}

std::vector<double> predict_aggregated_chain(const MondrianTree& tree,
                                             std::span<const double> x, std::size_t chain_splits,
                                             std::span<const double> prior_prediction) {
    if (chain_splits == 0) return predict_aggregated(tree, x, std::nullopt, prior_prediction);
    const NodeId leaf = tree.leaf_containing(x);
    const NodeRecord& rec = tree.node(leaf);
    const std::vector<double> leaf_value =
        tree.task() == Task::classification ? kt_predict(rec.stats, tree.n_classes())
                                            : std::vector<double>{mean_predict(rec.stats)};
    Carry carry;
    carry.value.assign(prior_prediction.begin(), prior_prediction.end());
    carry.log_avg = 0.0;
    // Bottom of the chain: the split that parts x from the stored point. Its
    // sibling holds that point and a copy of the leaf's state.
    combine(rec.log_weight, leaf_value, rec.log_avg_weight, carry);
    // Cells that still held both points: same state, empty siblings.
    for (std::size_t i = 1; i < chain_splits; ++i)
        combine(rec.log_weight, leaf_value, 0.0, carry);
    climb(tree, leaf, carry, [&tree](NodeId id) { return node_forecast(tree, id); });
    return carry.value;
}

double weighted_depth(const MondrianTree& tree, std::span<const double> x) {
    const NodeId leaf = tree.leaf_containing(x);
    // Depths along the path, cheapest to read off the path itself.
    std::vector<NodeId> path;
    for (NodeId id = leaf; id != kNoNode; id = tree.node(id).parent) path.push_back(id);
    const auto depth_of = [&path](NodeId id) -> double {
        for (std::size_t i = 0; i < path.size(); ++i)
            if (path[i] == id) return static_cast<double>(path.size() - 1 - i);
        throw std::logic_error("weighted_depth: node off the query path");
    };
    Carry carry;
    carry.value = {depth_of(leaf)};
    carry.log_avg = tree.node(leaf).log_avg_weight;
    climb(tree, leaf, carry, [&](NodeId id) { return std::vector<double>{depth_of(id)}; });
    return carry.value[0];
}

}  // namespace amf
