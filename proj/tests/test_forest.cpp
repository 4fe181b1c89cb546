#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "amf/forest.hpp"
#include "amf/rng.hpp"

using namespace amf;

namespace {

Stream random_stream(std::uint64_t seed, std::size_t n, int d, int k) {
    RngStream rng(seed, 0);
    Stream s;
    for (std::size_t i = 0; i < n; ++i) {
        Sample smp;
        for (int j = 0; j < d; ++j) smp.x.push_back(rng.uniform_open01());
        smp.y = std::floor(rng.uniform_open01() * k);
        s.push_back(smp);
    }
    return s;
}

ForestConfig small_config() {
    ForestConfig cfg;
    cfg.n_trees = 3;
    cfg.n_classes = 2;
    cfg.seed = 99;
    return cfg;
}

}  // namespace

TEST_CASE("forest configuration is validated") {
    ForestConfig cfg = small_config();
    cfg.n_trees = 0;
    CHECK_THROWS_AS(AMFForest{cfg}, std::invalid_argument);
    cfg = small_config();
    cfg.n_classes = 1;
    CHECK_THROWS_AS(AMFForest{cfg}, std::invalid_argument);
    cfg = small_config();
    cfg.task = Task::regression;
    cfg.range_bound = 0.0;
    CHECK_THROWS_AS(AMFForest{cfg}, std::invalid_argument);
    cfg = small_config();
    cfg.eta = -0.5;
    CHECK_THROWS_AS(AMFForest{cfg}, std::invalid_argument);
}

TEST_CASE("default learning rates depend on the loss") {
    ForestConfig cfg = small_config();
    CHECK(cfg.effective_eta() == 1.0);
    cfg.task = Task::regression;
    cfg.range_bound = 2.0;
    CHECK(cfg.effective_eta() == doctest::Approx(1.0 / 32.0));
    cfg.eta = 0.25;
    CHECK(cfg.effective_eta() == 0.25);
}

TEST_CASE("identical seeds give identical state and predictions") {
    const Stream stream = random_stream(7, 120, 2, 2);
    AMFForest a(small_config());
    AMFForest b(small_config());
    a.partial_fit(stream);
    b.partial_fit(stream);
    CHECK(a.state_digest() == b.state_digest());
    const std::vector<double> q{0.3, 0.7};
    const auto pa = a.predict_proba(q);
    const auto pb = b.predict_proba(q);
    CHECK(pa[0] == pb[0]);
    CHECK(pa[1] == pb[1]);

    ForestConfig other = small_config();
    other.seed = 100;
    AMFForest c(other);
    c.partial_fit(stream);
    CHECK(a.state_digest() != c.state_digest());
}

TEST_CASE("interleaved predictions do not disturb training") {
    const Stream stream = random_stream(8, 100, 2, 2);
    AMFForest plain(small_config());
    AMFForest interleaved(small_config());
    RngStream qrng(9, 0);
    for (const Sample& s : stream) {
        plain.partial_fit(s.x, s.y);
        const std::vector<double> q{qrng.uniform_open01(), qrng.uniform_open01()};
        (void)interleaved.predict_proba(q);
        interleaved.partial_fit(s.x, s.y);
        (void)interleaved.predict_proba(s.x);
        (void)interleaved.weighted_depths(q);
    }
    CHECK(plain.state_digest() == interleaved.state_digest());
    const std::vector<double> q{0.5, 0.5};
    CHECK(plain.predict_proba(q) == interleaved.predict_proba(q));
}

TEST_CASE("prediction is a pure function of the trained state") {
    const Stream stream = random_stream(10, 60, 2, 2);
    AMFForest f(small_config());
    f.partial_fit(stream);
    const std::vector<double> q{0.2, 0.9};
    CHECK(f.predict_proba(q) == f.predict_proba(q));
}

TEST_CASE("an unfitted forest predicts the prior") {
    AMFForest f(small_config());
    const auto p = f.predict_proba(std::vector<double>{0.1, 0.2});
    CHECK(p == std::vector<double>{0.5, 0.5});

    ForestConfig rcfg = small_config();
    rcfg.task = Task::regression;
    AMFForest r(rcfg);
    CHECK(r.predict_value(std::vector<double>{0.1}) == 0.0);
}

TEST_CASE("task and dimension misuse is rejected") {
    const Stream stream = random_stream(11, 20, 2, 2);
    AMFForest f(small_config());
    f.partial_fit(stream);
    CHECK_THROWS_AS(f.predict_value(std::vector<double>{0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(f.partial_fit(std::vector<double>{0.5}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(f.predict_proba(std::vector<double>{0.5}), std::invalid_argument);
    CHECK_THROWS_AS(f.partial_fit(std::vector<double>{0.5, 0.5}, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(f.partial_fit(std::vector<double>{0.5, 0.5}, 5.0), std::invalid_argument);

    ForestConfig rcfg = small_config();
    rcfg.task = Task::regression;
    rcfg.range_bound = 1.0;
    AMFForest r(rcfg);
    CHECK_THROWS_AS(r.partial_fit(std::vector<double>{0.5}, 1.5), std::invalid_argument);
}

TEST_CASE("update traces tie out against the trees") {
    const Stream stream = random_stream(12, 150, 2, 2);
    AMFForest f(small_config());
    f.set_trace(true);
    f.partial_fit(stream);
    REQUIRE(f.traces().size() == stream.size() * f.tree_count());
    for (const UpdateTrace& t : f.traces()) {
        CHECK(t.path_nodes == t.leaf_depth + 1);
        CHECK(t.created_nodes == t.node_delta);
        CHECK((t.created_nodes == 0 || t.created_nodes == 2));
        CHECK(t.visits() == t.path_nodes + t.created_nodes);
    }
}

TEST_CASE("suppressing pure splits keeps single-class trees flat") {
    ForestConfig cfg = small_config();
    cfg.split_pure = false;
    AMFForest f(cfg);
    RngStream rng(13, 0);
    for (int i = 0; i < 60; ++i)
        f.partial_fit(std::vector<double>{rng.uniform_open01(), rng.uniform_open01()}, 1.0);
    for (std::size_t m = 0; m < f.tree_count(); ++m) CHECK(f.tree(m).node_count() == 1);

    ForestConfig grow_cfg = small_config();
    AMFForest g(grow_cfg);
    RngStream rng2(13, 0);
    for (int i = 0; i < 60; ++i)
        g.partial_fit(std::vector<double>{rng2.uniform_open01(), rng2.uniform_open01()}, 1.0);
    CHECK(g.tree(0).node_count() > 1);  // faithful default still grows
}

TEST_CASE("the leaf-splitting variant trains and validates its domain") {
    ForestConfig cfg = small_config();
    cfg.variant = Variant::unrestricted;
    AMFForest f(cfg);
    const Stream stream = random_stream(14, 80, 2, 2);
    f.partial_fit(stream);
    CHECK(f.tree(0).node_count() > 1);
    const auto p = f.predict_proba(std::vector<double>{0.4, 0.4});
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(f.partial_fit(std::vector<double>{1.4, 0.2}, 1.0), std::invalid_argument);

    AMFForest g(cfg);
    g.partial_fit(stream);
    CHECK(f.state_digest() == g.state_digest());
}

TEST_CASE("weighted depth reports cover every tree") {
    AMFForest f(small_config());
    const auto empty = f.weighted_depths(std::vector<double>{0.1, 0.1});
    CHECK(empty.per_tree == std::vector<double>(3, 0.0));
    f.partial_fit(random_stream(15, 100, 2, 2));
    const auto rep = f.weighted_depths(std::vector<double>{0.5, 0.5});
    REQUIRE(rep.per_tree.size() == 3);
    double mean = 0.0;
    for (double d : rep.per_tree) {
        CHECK(d > 0.0);
        mean += d;
    }
    CHECK(rep.mean == doctest::Approx(mean / 3.0));
}

TEST_CASE("dummy baselines") {
    DummyClassifier clf(2);
    CHECK(clf.predict_proba() == std::vector<double>{0.5, 0.5});
    clf.partial_fit(0.0);
    clf.partial_fit(0.0);
    clf.partial_fit(1.0);
    const auto p = clf.predict_proba();
    CHECK(p[0] == doctest::Approx(2.5 / 4.0));
    CHECK(p[1] == doctest::Approx(1.5 / 4.0));
    CHECK_THROWS_AS(clf.partial_fit(0.5), std::invalid_argument);
    CHECK_THROWS_AS(DummyClassifier{1}, std::invalid_argument);

    DummyRegressor reg;
    CHECK(reg.predict_value() == 0.0);
    reg.partial_fit(1.0);
    reg.partial_fit(3.0);
    CHECK(reg.predict_value() == doctest::Approx(2.0));
}
