#include "amf/forest.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "amf/aggregation.hpp"

namespace amf {
namespace {

std::uint64_t fnv_step(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv_step(std::uint64_t h, double v) {
    return fnv_step(h, std::bit_cast<std::uint64_t>(v));
}

}  // namespace

LossKind ForestConfig::loss_kind() const {
    if (task == Task::classification) return {Loss::log_loss, 1.0};
    return {Loss::quadratic, range_bound};
}

double ForestConfig::effective_eta() const {
    return eta > 0.0 ? eta : loss_kind().default_eta();
}

AMFForest::AMFForest(ForestConfig cfg) : cfg_(cfg), eta_(cfg.effective_eta()) {
    if (cfg_.n_trees < 1) throw std::invalid_argument("AMFForest: need at least one tree");
    if (cfg_.task == Task::classification && cfg_.n_classes < 2)
        throw std::invalid_argument("AMFForest: classification needs at least two classes");
    if (cfg_.task == Task::regression && !(cfg_.range_bound > 0.0))
        throw std::invalid_argument("AMFForest: label bound must be positive");
    if (cfg_.eta < 0.0) throw std::invalid_argument("AMFForest: eta must not be negative");
}

std::vector<double> AMFForest::prior() const {
    if (cfg_.task == Task::classification)
        return std::vector<double>(static_cast<std::size_t>(cfg_.n_classes),
                                   1.0 / cfg_.n_classes);
    return {0.0};
}

void AMFForest::ensure_trees(std::size_t d) {
    if (!trees_.empty()) {
        if (d != static_cast<std::size_t>(dim_))
            throw std::invalid_argument("AMFForest: feature dimension changed between calls");
        return;
    }
    if (d == 0) throw std::invalid_argument("AMFForest: empty feature vector");
    dim_ = static_cast<int>(d);
    const int n_classes = cfg_.task == Task::classification ? cfg_.n_classes : 0;
    trees_.reserve(static_cast<std::size_t>(cfg_.n_trees));
    tree_rngs_.reserve(static_cast<std::size_t>(cfg_.n_trees));
    for (int m = 0; m < cfg_.n_trees; ++m) {
        trees_.emplace_back(dim_, cfg_.task, n_classes);
        tree_rngs_.emplace_back(cfg_.seed, static_cast<std::uint64_t>(m) + 1);
    }
}

void AMFForest::partial_fit(std::span<const double> x, double y) {
    ensure_trees(x.size());
    if (cfg_.task == Task::classification) {
        const int label = static_cast<int>(y);
        if (static_cast<double>(label) != y || label < 0 || label >= cfg_.n_classes)
            throw std::invalid_argument("partial_fit: class label out of range");
    } else if (std::abs(y) > cfg_.range_bound) {
        throw std::invalid_argument("partial_fit: label outside [-B, B]");
    }
    const LossKind kind = cfg_.loss_kind();
    for (std::size_t m = 0; m < trees_.size(); ++m) {
        MondrianTree& tree = trees_[m];
        const std::size_t nodes_before = tree.node_count();
        NodeId leaf;
        std::size_t created;
        if (cfg_.variant == Variant::restricted) {
            const int suppress = (!cfg_.split_pure && cfg_.task == Task::classification)
                                     ? static_cast<int>(y)
                                     : -1;
            const RestrictedUpdate up = restricted_update(tree, x, tree_rngs_[m], suppress);
            leaf = up.leaf;
            created = up.created;
        } else {
            leaf = extend_unrestricted(tree, x, tree_rngs_[m]);
            created = tree.node_count() - nodes_before;
        }
        const std::size_t path = update_weights_upward(tree, leaf, y, eta_, kind);
        if (trace_) {
            UpdateTrace t;
            t.path_nodes = static_cast<std::uint32_t>(path);
            t.created_nodes = static_cast<std::uint32_t>(created);
            t.leaf_depth = static_cast<std::uint32_t>(tree.depth_of(leaf));
            t.node_delta = static_cast<std::uint32_t>(tree.node_count() - nodes_before);
            traces_.push_back(t);
        }
    }
    ++samples_seen_;
}

void AMFForest::partial_fit(const Stream& stream) {
    for (const Sample& s : stream) partial_fit(s.x, s.y);
}

std::vector<std::vector<double>> AMFForest::predict_all_trees(std::span<const double> x) const {
    const std::vector<double> h0 = prior();
    if (trees_.empty())
        return std::vector<std::vector<double>>(static_cast<std::size_t>(cfg_.n_trees), h0);
    if (x.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("predict: dimension mismatch");
    std::vector<std::vector<double>> out;
    out.reserve(trees_.size());
    for (std::size_t m = 0; m < trees_.size(); ++m) {
        const MondrianTree& tree = trees_[m];
        RngStream preview = tree_rngs_[m];  // throwaway copy, training stream untouched
        if (cfg_.variant == Variant::restricted) {
            const auto vs = sample_virtual_split(tree, x, preview);
            out.push_back(predict_aggregated(tree, x, vs, h0));
        } else {
            const std::size_t chain = sample_virtual_chain_unrestricted(tree, x, preview);
            out.push_back(predict_aggregated_chain(tree, x, chain, h0));
        }
    }
    return out;
}

std::vector<double> AMFForest::predict_proba(std::span<const double> x) const {
    if (cfg_.task != Task::classification)
        throw std::invalid_argument("predict_proba: not a classification forest");
    const auto per_tree = predict_all_trees(x);
    std::vector<double> mean(static_cast<std::size_t>(cfg_.n_classes), 0.0);
    for (const auto& p : per_tree)
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += p[c];
    for (double& v : mean) v /= static_cast<double>(per_tree.size());
    return mean;
}

double AMFForest::predict_value(std::span<const double> x) const {
    if (cfg_.task != Task::regression)
        throw std::invalid_argument("predict_value: not a regression forest");
    const auto per_tree = predict_all_trees(x);
    double mean = 0.0;
    for (const auto& p : per_tree) mean += p[0];
    return mean / static_cast<double>(per_tree.size());
}

AMFForest::DepthReport AMFForest::weighted_depths(std::span<const double> x) const {
    DepthReport rep;
    if (trees_.empty()) {
        rep.per_tree.assign(static_cast<std::size_t>(cfg_.n_trees), 0.0);
        return rep;
    }
    rep.per_tree.reserve(trees_.size());
    for (const MondrianTree& tree : trees_) rep.per_tree.push_back(weighted_depth(tree, x));
    for (double d : rep.per_tree) rep.mean += d;
    rep.mean /= static_cast<double>(rep.per_tree.size());
    return rep;
}

void AMFForest::set_trace(bool on) {
    trace_ = on;
    traces_.clear();
}

std::uint64_t AMFForest::state_digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv_step(h, static_cast<std::uint64_t>(trees_.size()));
    for (const MondrianTree& tree : trees_) {
        h = fnv_step(h, static_cast<std::uint64_t>(tree.node_count()));
        for (NodeId id = 0; id < tree.node_count(); ++id) {
            const NodeRecord& rec = tree.node(id);
            h = fnv_step(h, static_cast<std::uint64_t>(rec.parent));
            h = fnv_step(h, static_cast<std::uint64_t>(rec.left));
            h = fnv_step(h, static_cast<std::uint64_t>(rec.right));
            h = fnv_step(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(rec.split_dim)));
            h = fnv_step(h, rec.split_threshold);
            h = fnv_step(h, rec.birth_time);
            h = fnv_step(h, rec.log_weight);
            h = fnv_step(h, rec.log_avg_weight);
            for (double v : rec.range_low) h = fnv_step(h, v);
            for (double v : rec.range_high) h = fnv_step(h, v);
            h = fnv_step(h, rec.stats.count);
            h = fnv_step(h, rec.stats.label_sum);
            for (std::uint32_t c : rec.stats.class_counts)
                h = fnv_step(h, static_cast<std::uint64_t>(c));
        }
    }
    return h;
}

DummyClassifier::DummyClassifier(int n_classes) : n_classes_(n_classes) {
    if (n_classes < 2) throw std::invalid_argument("DummyClassifier: need at least two classes");
}

void DummyClassifier::partial_fit(double y) {
    const int label = static_cast<int>(y);
    if (static_cast<double>(label) != y)
        throw std::invalid_argument("DummyClassifier: non-integer class label");
    stats_.add_class(label, n_classes_);
}

std::vector<double> DummyClassifier::predict_proba() const {
    return kt_predict(stats_, n_classes_);
}

void DummyRegressor::partial_fit(double y) { stats_.add_value(y); }

double DummyRegressor::predict_value() const { return mean_predict(stats_); }

}  // namespace amf
