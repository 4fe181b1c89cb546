#include "amf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace amf::oracle {
namespace {

constexpr std::size_t kMaxInternal = 20;

std::size_t internal_count(const MondrianTree& tree) {
    std::size_t n = 0;
    for (NodeId id = 0; id < tree.node_count(); ++id)
        if (!tree.node(id).is_leaf()) ++n;
    return n;
}

void check_guard(const MondrianTree& tree) {
    if (internal_count(tree) > kMaxInternal)
        throw std::invalid_argument("oracle: tree too large for exhaustive enumeration");
}

std::vector<Pruning> enumerate_at(const MondrianTree& tree, NodeId id) {
    std::vector<Pruning> out;
    const bool internal = !tree.node(id).is_leaf();
    Pruning cut;
    cut.nodes = {id};
    cut.leaves = {id};
    cut.internal_in_base = internal ? 1 : 0;
    out.push_back(std::move(cut));
    if (!internal) return out;
    const auto lefts = enumerate_at(tree, tree.node(id).left);
    const auto rights = enumerate_at(tree, tree.node(id).right);
    for (const Pruning& l : lefts) {
        for (const Pruning& r : rights) {
            Pruning p;
            p.nodes.reserve(1 + l.nodes.size() + r.nodes.size());
            p.nodes.push_back(id);
            p.nodes.insert(p.nodes.end(), l.nodes.begin(), l.nodes.end());
            p.nodes.insert(p.nodes.end(), r.nodes.begin(), r.nodes.end());
            p.leaves.reserve(l.leaves.size() + r.leaves.size());
            p.leaves.insert(p.leaves.end(), l.leaves.begin(), l.leaves.end());
            p.leaves.insert(p.leaves.end(), r.leaves.begin(), r.leaves.end());
            p.internal_in_base = 1 + l.internal_in_base + r.internal_in_base;
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<double> node_forecast(const MondrianTree& tree, NodeId id) {
    const NodeRecord& rec = tree.node(id);
    if (tree.task() == Task::classification) return kt_predict(rec.stats, tree.n_classes());
    return {mean_predict(rec.stats)};
}

// Weighted average over prunings of a per-pruning value vector.
std::vector<double> aggregate(const MondrianTree& tree, std::span<const double> x,
                              bool use_depth) {
    check_guard(tree);
    const auto prunings = enumerate_prunings(tree);
    std::vector<long double> log_weights;
    log_weights.reserve(prunings.size());
    long double max_log = -std::numeric_limits<long double>::infinity();
    for (const Pruning& p : prunings) {
        long double lw = -static_cast<long double>(p.internal_in_base) * 0.6931471805599453094172321L;
        for (NodeId leaf : p.leaves) lw += static_cast<long double>(tree.node(leaf).log_weight);
        log_weights.push_back(lw);
        if (lw > max_log) max_log = lw;
    }
    const std::size_t width =
        use_depth ? 1
                  : (tree.task() == Task::classification
                         ? static_cast<std::size_t>(tree.n_classes())
                         : 1);
    std::vector<long double> num(width, 0.0L);
    long double denom = 0.0L;
    for (std::size_t i = 0; i < prunings.size(); ++i) {
        const long double w = std::exp(log_weights[i] - max_log);
        const NodeId leaf = pruning_leaf_for(tree, prunings[i], x);
        denom += w;
        if (use_depth) {
            num[0] += w * static_cast<long double>(tree.depth_of(leaf));
        } else {
            const std::vector<double> f = node_forecast(tree, leaf);
            for (std::size_t c = 0; c < width; ++c)
                num[c] += w * static_cast<long double>(f[c]);
        }
    }
    std::vector<double> out(width);
    for (std::size_t c = 0; c < width; ++c) out[c] = static_cast<double>(num[c] / denom);
    return out;
}

}  // namespace

std::vector<Pruning> enumerate_prunings(const MondrianTree& tree) {
    check_guard(tree);
    return enumerate_at(tree, tree.root());
}

double prior_mass(const Pruning& pruning, const MondrianTree& tree) {
    if (pruning.nodes.empty()) throw std::invalid_argument("prior_mass: empty pruning");
    std::unordered_set<NodeId> members(pruning.nodes.begin(), pruning.nodes.end());
    if (!members.count(tree.root())) throw std::invalid_argument("prior_mass: root not in pruning");
    std::size_t internal_in_base = 0;
    for (NodeId id : pruning.nodes) {
        const NodeRecord& rec = tree.node(id);
        if (!rec.is_leaf()) {
            ++internal_in_base;
            if (members.count(rec.left) != members.count(rec.right))
                throw std::invalid_argument("prior_mass: pruning keeps only one child");
        }
        if (rec.parent != kNoNode && !members.count(rec.parent))
            throw std::invalid_argument("prior_mass: disconnected pruning");
    }
    if (internal_in_base != pruning.internal_in_base)
        throw std::invalid_argument("prior_mass: stale internal count");
    return std::ldexp(1.0, -static_cast<int>(internal_in_base));
}

std::vector<double> brute_force_aggregate(const MondrianTree& tree, std::span<const double> x) {
    return aggregate(tree, x, false);
}

double brute_force_weighted_depth(const MondrianTree& tree, std::span<const double> x) {
    return aggregate(tree, x, true)[0];
}

NodeId pruning_leaf_for(const MondrianTree& tree, const Pruning& pruning,
                        std::span<const double> x) {
    std::unordered_set<NodeId> leaves(pruning.leaves.begin(), pruning.leaves.end());
    NodeId id = tree.root();
    while (!leaves.count(id)) {
        const NodeRecord& rec = tree.node(id);
        if (rec.is_leaf()) throw std::invalid_argument("pruning_leaf_for: pruning not closed");
        id = (x[static_cast<std::size_t>(rec.split_dim)] <= rec.split_threshold) ? rec.left
                                                                                 : rec.right;
    }
    return id;
}

double pruning_cumulative_loss(const MondrianTree& tree, const Pruning& pruning,
                               const Stream& stream, const LossKind& kind) {
    std::unordered_map<NodeId, NodeStats> cells;
    for (NodeId leaf : pruning.leaves) cells.emplace(leaf, NodeStats{});
    double total = 0.0;
    for (const Sample& s : stream) {
        const NodeId leaf = pruning_leaf_for(tree, pruning, s.x);
        NodeStats& stats = cells.at(leaf);
        if (tree.task() == Task::classification) {
            total += loss_value(kind, kt_predict(stats, tree.n_classes()), s.y);
            stats.add_class(static_cast<int>(s.y), tree.n_classes());
        } else {
            const double pred[1] = {mean_predict(stats)};
            total += loss_value(kind, pred, s.y);
            stats.add_value(s.y);
        }
    }
    return total;
}

double pruning_best_constant_loss(const MondrianTree& tree, const Pruning& pruning,
                                  const Stream& stream, const LossKind& kind) {
    struct CellTally {
        std::unordered_map<int, std::size_t> counts;
        double sum = 0.0, sum_sq = 0.0;
        std::size_t n = 0;
    };
    std::unordered_map<NodeId, CellTally> cells;
    for (const Sample& s : stream) {
        CellTally& t = cells[pruning_leaf_for(tree, pruning, s.x)];
        if (kind.loss == Loss::log_loss) {
            t.counts[static_cast<int>(s.y)] += 1;
        } else {
            t.sum += s.y;
            t.sum_sq += s.y * s.y;
        }
        t.n += 1;
    }
    double total = 0.0;
    for (const auto& [leaf, t] : cells) {
        if (t.n == 0) continue;
        if (kind.loss == Loss::log_loss) {
            // Best constant distribution is the empirical one: n * entropy.
            for (const auto& [label, c] : t.counts)
                total += static_cast<double>(c) *
                         std::log(static_cast<double>(t.n) / static_cast<double>(c));
        } else {
            // Best constant value is the cell mean; clamp rounding residue.
            const double mean = t.sum / static_cast<double>(t.n);
            total += std::max(0.0, t.sum_sq - static_cast<double>(t.n) * mean * mean);
        }
    }
    return total;
}

MondrianTree materialize_virtual(const MondrianTree& tree, const VirtualSplit& vs,
                                 std::span<const double> x) {
    MondrianTree copy = tree;
    const auto [internal, leaf] =
        copy.insert_internal_above(vs.host, vs.split_dim, vs.threshold, vs.birth, vs.side);
    copy.extend_range(internal, x);
    copy.extend_range(leaf, x);
    return copy;
}

}  // namespace amf::oracle
