#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "amf/metrics.hpp"
#include "amf/rng.hpp"

using namespace amf;

namespace {

Stream two_class_stream(std::uint64_t seed, std::size_t n) {
    RngStream rng(seed, 0);
    Stream s;
    for (std::size_t i = 0; i < n; ++i) {
        Sample smp;
        const double y = rng.uniform_open01() < 0.5 ? 0.0 : 1.0;
        smp.x = {rng.uniform_open01() + y, rng.uniform_open01()};
        smp.y = y;
        s.push_back(smp);
    }
    return s;
}

}  // namespace

TEST_CASE("progressive evaluation reproduces a hand-rolled prequential loop") {
    const Stream stream = two_class_stream(20, 80);
    ForestConfig cfg;
    cfg.n_trees = 2;
    cfg.seed = 5;
    const LossKind kind = cfg.loss_kind();

    AMFForest harness_forest(cfg);
    ForestLearner amf(harness_forest);
    DummyLearner dummy(Task::classification, 2);
    const auto curves = progressive_eval({{"amf", &amf}, {"dummy", &dummy}}, stream, kind);
    REQUIRE(curves.at("amf").size() == stream.size());
    REQUIRE(curves.at("dummy").size() == stream.size());

    AMFForest manual(cfg);
    DummyClassifier manual_dummy(2);
    double amf_sum = 0.0, dummy_sum = 0.0;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        const Sample& s = stream[t];
        amf_sum += loss_value(kind, manual.predict_proba(s.x), s.y);
        dummy_sum += loss_value(kind, manual_dummy.predict_proba(), s.y);
        manual.partial_fit(s.x, s.y);
        manual_dummy.partial_fit(s.y);
        CHECK(curves.at("amf")[t] == amf_sum / static_cast<double>(t + 1));
        CHECK(curves.at("dummy")[t] == dummy_sum / static_cast<double>(t + 1));
    }
    // the first prediction happens before any update: uniform, loss log 2
    CHECK(curves.at("amf")[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(curves.at("dummy")[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("progressive evaluation validates its inputs") {
    ForestConfig cfg;
    AMFForest forest(cfg);
    ForestLearner amf(forest);
    const Stream stream = two_class_stream(21, 5);
    CHECK_THROWS_AS(progressive_eval({{"amf", &amf}}, Stream{}, cfg.loss_kind()),
                    std::invalid_argument);
    CHECK_THROWS_AS(progressive_eval({{"a", &amf}, {"a", &amf}}, stream, cfg.loss_kind()),
                    std::invalid_argument);
    CHECK_THROWS_AS(progressive_eval({{"amf", nullptr}}, stream, cfg.loss_kind()),
                    std::invalid_argument);
}

TEST_CASE("AUC on separable and anti-separable scores") {
    const std::vector<int> labels{1, 1, 0, 0};
    CHECK(auc(std::vector<double>{0.9, 0.8, 0.3, 0.2}, labels) == doctest::Approx(1.0));
    CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, labels) == doctest::Approx(0.0));
    // positives {0.9, 0.4} vs negatives {0.8, 0.3}: three wins out of four
    CHECK(auc(std::vector<double>{0.9, 0.4, 0.8, 0.3}, labels) == doctest::Approx(0.75));
    // positives {0.9, 0.2} vs negatives {0.3, 0.8}: two wins out of four
    CHECK(auc(std::vector<double>{0.9, 0.2, 0.3, 0.8}, labels) == doctest::Approx(0.5));
}

TEST_CASE("AUC counts ties as one half") {
    CHECK(auc(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}) == doctest::Approx(0.5));
    CHECK(auc(std::vector<double>{0.7, 0.5, 0.5, 0.1}, std::vector<int>{1, 1, 0, 0}) ==
          doctest::Approx(0.875));
}

TEST_CASE("AUC is invariant under strictly increasing transforms") {
    RngStream rng(22, 0);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        scores.push_back(rng.uniform_open01());
        labels.push_back(rng.uniform_open01() < 0.3 ? 1 : 0);
    }
    std::vector<double> warped;
    for (double s : scores) warped.push_back(std::exp(3.0 * s) - 10.0);
    CHECK(auc(scores, labels) == doctest::Approx(auc(warped, labels)).epsilon(1e-15));
}

TEST_CASE("AUC validates labels") {
    CHECK_THROWS_AS(auc(std::vector<double>{0.5}, std::vector<int>{1, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(auc(std::vector<double>{0.5, 0.6}, std::vector<int>{1, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(auc(std::vector<double>{0.5, 0.6}, std::vector<int>{1, 1}),
                    std::invalid_argument);
}

TEST_CASE("the regret report certifies the aggregation bound on a small stream") {
    ForestConfig cfg;
    cfg.n_trees = 4;  // overridden to one tree internally
    cfg.seed = 30;
    cfg.variant = Variant::unrestricted;
    RngStream rng(23, 0);
    Stream stream;
    const std::vector<std::vector<double>> pts = {{0.1, 0.9}, {0.5, 0.1}, {0.9, 0.5}};
    for (int i = 0; i < 150; ++i) {
        Sample s;
        s.x = pts[static_cast<std::size_t>(rng.uniform_open01() * pts.size())];
        s.y = rng.uniform_open01() < 0.5 ? 0.0 : 1.0;
        stream.push_back(s);
    }
    const RegretReport rep = regret_report(cfg, stream);
    REQUIRE(!rep.prunings.empty());
    CHECK(rep.amf_loss >= rep.best_pruning_loss - 1e-9);
    CHECK(rep.amf_loss <= rep.best_pruning_loss + rep.bound + 1e-9);
    for (const PruningRegret& p : rep.prunings) {
        CHECK(p.n_nodes >= 1);
        // sequential add-half forecasts are a mixture over constants, so the
        // replayed loss can never beat the best constant in hindsight
        CHECK(p.replay_loss >= p.best_constant_loss - 1e-9);
    }
}

TEST_CASE("learner adapters expose the right prediction shapes") {
    ForestConfig cfg;
    cfg.task = Task::regression;
    cfg.range_bound = 1.0;
    AMFForest forest(cfg);
    ForestLearner learner(forest);
    CHECK(learner.predict(std::vector<double>{0.5}).size() == 1);
    DummyLearner dummy(Task::regression, 2);
    CHECK(dummy.predict(std::vector<double>{0.5}) == std::vector<double>{0.0});
    dummy.update(std::vector<double>{0.5}, 0.8);
    CHECK(dummy.predict(std::vector<double>{0.5}) == std::vector<double>{0.8});
}
