#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amf/forecasters.hpp"
#include "amf/forest.hpp"
#include "amf/types.hpp"

namespace amf {

// Anything that can play in the prequential harness.
class OnlineLearner {
public:
    virtual ~OnlineLearner() = default;
    virtual std::vector<double> predict(std::span<const double> x) = 0;
    virtual void update(std::span<const double> x, double y) = 0;
};

class ForestLearner : public OnlineLearner {
public:
    explicit ForestLearner(AMFForest& forest) : forest_(forest) {}
    std::vector<double> predict(std::span<const double> x) override;
    void update(std::span<const double> x, double y) override;

private:
    AMFForest& forest_;
};

// Feature-free baseline of matching task.
class DummyLearner : public OnlineLearner {
public:
    DummyLearner(Task task, int n_classes);
    std::vector<double> predict(std::span<const double> x) override;
    void update(std::span<const double> x, double y) override;

private:
    Task task_;
    DummyClassifier clf_;
    DummyRegressor reg_;
};

// Progressive average loss after t samples, index t - 1.
using LossCurve = std::vector<double>;

// Prequential protocol: at every step each learner forecasts the sample
// before its label is revealed, losses are recorded, then each learner
// updates. Returns one curve per learner name.
std::map<std::string, LossCurve> progressive_eval(
    const std::vector<std::pair<std::string, OnlineLearner*>>& learners, const Stream& stream,
    const LossKind& kind);

// Area under the ROC curve: normalized Mann-Whitney statistic with ties
// counted half. Labels are 0/1 and both classes must be present.
double auc(std::span<const double> scores, std::span<const int> labels);

struct PruningRegret {
    std::size_t n_nodes = 0;
    double replay_loss = 0.0;
    double best_constant_loss = 0.0;
};

struct RegretReport {
    double amf_loss = 0.0;           // cumulative prequential loss of the forest
    double best_pruning_loss = 0.0;  // min over prunings of the replayed loss
    double bound = 0.0;              // |T*| log(2) / eta for the minimizing pruning
    std::vector<PruningRegret> prunings;
};

// Trains a single tree over the stream (prequential, predict-then-update),
// then replays every pruning of the final tree and reports the regret data.
// cfg.n_trees is overridden to 1.
RegretReport regret_report(ForestConfig cfg, const Stream& stream);

}  // namespace amf
