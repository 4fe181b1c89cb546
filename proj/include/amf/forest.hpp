#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amf/forecasters.hpp"
#include "amf/mondrian.hpp"
#include "amf/rng.hpp"
#include "amf/tree.hpp"
#include "amf/types.hpp"

namespace amf {

enum class Variant { restricted, unrestricted };

struct ForestConfig {
    int n_trees = 10;
    Task task = Task::classification;
    int n_classes = 2;
    double range_bound = 1.0;  // label bound B, quadratic loss only
    double eta = 0.0;          // 0 picks the loss default: 1 (log), 1/(8 B^2) (quadratic)
    std::uint64_t seed = 42;
    Variant variant = Variant::restricted;
    bool split_pure = true;  // false enables the single-class no-split heuristic

    LossKind loss_kind() const;
    double effective_eta() const;
};

// Instrumentation of one tree update: nodes on the reweighted path, nodes
// created by the structural phase, plus the same two quantities measured
// independently from the tree so tests can cross-check the counters.
struct UpdateTrace {
    std::uint32_t path_nodes = 0;
    std::uint32_t created_nodes = 0;
    std::uint32_t leaf_depth = 0;  // depth of the updated leaf, right after the update
    std::uint32_t node_delta = 0;  // node-count growth of the tree

    std::uint32_t visits() const { return path_nodes + created_nodes; }
};

// Online forest: every tree grows per sample and predicts by exact
// aggregation over its prunings; the forest output is the average.
class AMFForest {
public:
    explicit AMFForest(ForestConfig cfg);

    const ForestConfig& config() const { return cfg_; }
    int dim() const { return dim_; }
    std::uint64_t samples_seen() const { return samples_seen_; }
    std::size_t tree_count() const { return trees_.size(); }
    const MondrianTree& tree(std::size_t m) const { return trees_[m]; }

    void partial_fit(std::span<const double> x, double y);
    void partial_fit(const Stream& stream);

    // Class probabilities (mean of the per-tree aggregated forecasts).
    // Each tree's temporary extension previews the tree's own growth stream
    // through a throwaway copy: the virtual split is the split the next
    // update at x would insert, training randomness is never advanced, and
    // prediction is a pure function of the forest state. Previewing the real
    // extension (rather than an independent draw) is what makes the
    // prequential loss telescope exactly into the stored averaged weights.
    std::vector<double> predict_proba(std::span<const double> x) const;
    double predict_value(std::span<const double> x) const;
    std::vector<std::vector<double>> predict_all_trees(std::span<const double> x) const;

    struct DepthReport {
        std::vector<double> per_tree;
        double mean = 0.0;
    };
    DepthReport weighted_depths(std::span<const double> x) const;

    void set_trace(bool on);
    const std::vector<UpdateTrace>& traces() const { return traces_; }

    // Order-independent fingerprint of all tree state, for determinism checks.
    std::uint64_t state_digest() const;

private:
    std::vector<double> prior() const;
    void ensure_trees(std::size_t d);

    ForestConfig cfg_;
    double eta_;
    std::vector<MondrianTree> trees_;
    std::vector<RngStream> tree_rngs_;
    int dim_ = 0;
    std::uint64_t samples_seen_ = 0;
    bool trace_ = false;
    std::vector<UpdateTrace> traces_;
};

// Feature-free baseline: KT estimator over every label seen so far.
class DummyClassifier {
public:
    explicit DummyClassifier(int n_classes);
    void partial_fit(double y);
    std::vector<double> predict_proba() const;
    int n_classes() const { return n_classes_; }

private:
    NodeStats stats_;
    int n_classes_;
};

// Feature-free regression baseline: running label mean, 0 before any data.
class DummyRegressor {
public:
    void partial_fit(double y);
    double predict_value() const;

private:
    NodeStats stats_;
};

}  // namespace amf
