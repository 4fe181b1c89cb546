#include "amf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "amf/oracle.hpp"

namespace amf {

std::vector<double> ForestLearner::predict(std::span<const double> x) {
    if (forest_.config().task == Task::classification) return forest_.predict_proba(x);
    return {forest_.predict_value(x)};
}

void ForestLearner::update(std::span<const double> x, double y) { forest_.partial_fit(x, y); }

DummyLearner::DummyLearner(Task task, int n_classes)
    : task_(task), clf_(task == Task::classification ? n_classes : 2) {}

std::vector<double> DummyLearner::predict(std::span<const double>) {
    if (task_ == Task::classification) return clf_.predict_proba();
    return {reg_.predict_value()};
}

void DummyLearner::update(std::span<const double>, double y) {
    if (task_ == Task::classification)
        clf_.partial_fit(y);
    else
        reg_.partial_fit(y);
}

std::map<std::string, LossCurve> progressive_eval(
    const std::vector<std::pair<std::string, OnlineLearner*>>& learners, const Stream& stream,
    const LossKind& kind) {
    if (learners.empty()) throw std::invalid_argument("progressive_eval: no learners");
    if (stream.empty()) throw std::invalid_argument("progressive_eval: empty stream");
    std::map<std::string, LossCurve> curves;
    std::map<std::string, double> cumulative;
    for (const auto& [name, learner] : learners) {
        if (!learner) throw std::invalid_argument("progressive_eval: null learner");
        curves[name].reserve(stream.size());
        cumulative[name] = 0.0;
    }
    if (curves.size() != learners.size())
        throw std::invalid_argument("progressive_eval: duplicate learner name");
    std::size_t t = 0;
    for (const Sample& s : stream) {
        ++t;
        // Everyone forecasts before anyone sees the label.
        for (const auto& [name, learner] : learners) {
            const std::vector<double> pred = learner->predict(s.x);
            cumulative[name] += loss_value(kind, pred, s.y);
            curves[name].push_back(cumulative[name] / static_cast<double>(t));
        }
        for (const auto& [name, learner] : learners) learner->update(s.x, s.y);
    }
    return curves;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::invalid_argument("auc: size mismatch or empty input");
    std::size_t n_pos = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw std::invalid_argument("auc: labels must be 0 or 1");
        n_pos += static_cast<std::size_t>(l);
    }
    const std::size_t n = scores.size();
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: both classes required");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks within tie groups, then the Mann-Whitney rank sum.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

RegretReport regret_report(ForestConfig cfg, const Stream& stream) {
    if (stream.empty()) throw std::invalid_argument("regret_report: empty stream");
    cfg.n_trees = 1;
    AMFForest forest(cfg);
    const LossKind kind = cfg.loss_kind();
    ForestLearner learner(forest);
    RegretReport rep;
    for (const Sample& s : stream) {
        rep.amf_loss += loss_value(kind, learner.predict(s.x), s.y);
        learner.update(s.x, s.y);
    }
    const MondrianTree& tree = forest.tree(0);
    const auto prunings = oracle::enumerate_prunings(tree);
    rep.best_pruning_loss = std::numeric_limits<double>::infinity();
    std::size_t best_nodes = 0;
    for (const auto& p : prunings) {
        PruningRegret r;
        r.n_nodes = p.nodes.size();
        r.replay_loss = oracle::pruning_cumulative_loss(tree, p, stream, kind);
        r.best_constant_loss = oracle::pruning_best_constant_loss(tree, p, stream, kind);
        if (r.replay_loss < rep.best_pruning_loss) {
            rep.best_pruning_loss = r.replay_loss;
            best_nodes = r.n_nodes;
        }
        rep.prunings.push_back(r);
    }
    rep.bound = static_cast<double>(best_nodes) * 0.6931471805599453 / cfg.effective_eta();
    return rep;
}

}  // namespace amf
