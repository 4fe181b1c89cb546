#include "cli/cli_app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "amf/forest.hpp"
#include "amf/metrics.hpp"
#include "amf/mondrian.hpp"
#include "amf/oracle.hpp"
#include "cli/csv.hpp"
#include "cli/synthetic.hpp"

namespace amf::cli {
namespace {

struct Opts {
    std::string data_path;
    std::string synthetic;
    std::size_t n = 0;
    std::string label_col = "-1";
    std::string task = "clf";
    int n_classes = 0;  // 0 = infer from the labels
    double range_bound = 1.0;
    int n_trees = 10;
    double eta = 0.0;  // 0 = loss default
    std::uint64_t seed = 42;
    std::size_t stride = 100;
    std::string out;
    std::string split_pure = "on";
    std::size_t reps = 0;
    double lambda = 1.0;
    int dim = 1;
    std::size_t depth_profile = 0;
    bool inject_corruption = false;
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw CliError(2, "cannot open output file: " + out_path);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

Stream load_stream(const Opts& o) {
    const bool have_data = !o.data_path.empty();
    const bool have_synth = !o.synthetic.empty();
    if (have_data == have_synth)
        throw CliError(2, "exactly one of --data and --synthetic is required");
    if (have_synth) {
        if (o.synthetic != "gauss2")
            throw CliError(2, "unknown synthetic stream '" + o.synthetic + "' (try gauss2)");
        if (o.n == 0) throw CliError(2, "--synthetic requires --n >= 1");
        return make_gauss2(o.n, o.seed);
    }
    Stream s = load_csv(o.data_path, o.label_col).stream;
    if (s.empty()) throw CliError(2, o.data_path + ": no samples");
    return s;
}

// Number of classes: taken from --n-classes or inferred as max label + 1.
// Labels must be non-negative integers below the class count.
int resolve_classes(const Stream& stream, int flag_value) {
    int max_label = -1;
    for (const Sample& s : stream) {
        const int label = static_cast<int>(s.y);
        if (static_cast<double>(label) != s.y || label < 0)
            throw CliError(2, "classification label is not a non-negative integer: " + fmt(s.y));
        if (label > max_label) max_label = label;
    }
    const int k = flag_value > 0 ? flag_value : max_label + 1;
    if (k < 2) throw CliError(4, "degenerate labels: fewer than two classes in the stream");
    if (max_label >= k)
        throw CliError(2, "label " + std::to_string(max_label) + " exceeds --n-classes " +
                              std::to_string(k));
    return k;
}

void check_regression_labels(const Stream& stream, double bound) {
    for (const Sample& s : stream)
        if (std::abs(s.y) > bound)
            throw CliError(2, "regression label " + fmt(s.y) + " outside [-B, B] with B = " +
                                  fmt(bound));
}

ForestConfig forest_config(const Opts& o, Task task, int n_classes) {
    ForestConfig cfg;
    cfg.n_trees = o.n_trees;
    cfg.task = task;
    cfg.n_classes = n_classes;
    cfg.range_bound = o.range_bound;
    cfg.eta = o.eta;
    cfg.seed = o.seed;
    cfg.split_pure = o.split_pure == "on";
    return cfg;
}

int cmd_online(const Opts& o) {
    const Stream stream = load_stream(o);
    const Task task = o.task == "clf" ? Task::classification : Task::regression;
    int n_classes = 2;
    if (task == Task::classification)
        n_classes = resolve_classes(stream, o.n_classes);
    else
        check_regression_labels(stream, o.range_bound);
    const ForestConfig cfg = forest_config(o, task, n_classes);
    AMFForest forest(cfg);
    ForestLearner amf(forest);
    DummyLearner dummy(task, n_classes);
    const auto curves = progressive_eval({{"amf", &amf}, {"dummy", &dummy}}, stream,
                                         cfg.loss_kind());
    std::ostringstream buf;
    buf << "t,avg_loss_amf,avg_loss_dummy\n";
    const LossCurve& amf_curve = curves.at("amf");
    const LossCurve& dummy_curve = curves.at("dummy");
    for (std::size_t t = 0; t < stream.size(); ++t)
        buf << (t + 1) << ',' << fmt(amf_curve[t]) << ',' << fmt(dummy_curve[t]) << '\n';
    write_output(buf.str(), o.out);
    return 0;
}

struct BinarySplit {
    Stream train;
    Stream test;
    std::vector<int> test_labels;
};

// Deterministic 70/30 split by seeded shuffle; demands both classes in the
// stream and in the held-out part.
BinarySplit split_binary(const Stream& stream, std::uint64_t seed) {
    bool saw[2] = {false, false};
    for (const Sample& s : stream) saw[static_cast<int>(s.y)] = true;
    if (!saw[0] || !saw[1]) throw CliError(4, "degenerate labels: need both classes");

    std::vector<std::size_t> order(stream.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    RngStream rng(seed, 0x73706c6974ULL);  // the split has its own stream
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_open01() * static_cast<double>(i));
        std::swap(order[i - 1], order[j]);
    }
    const std::size_t n_train = stream.size() * 7 / 10;
    if (n_train == 0 || n_train == stream.size())
        throw CliError(2, "stream too small for a 70/30 split");
    BinarySplit out;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (i < n_train) {
            out.train.push_back(stream[order[i]]);
        } else {
            out.test.push_back(stream[order[i]]);
            out.test_labels.push_back(static_cast<int>(stream[order[i]].y));
        }
    }
    bool test_saw[2] = {false, false};
    for (int l : out.test_labels) test_saw[l] = true;
    if (!test_saw[0] || !test_saw[1])
        throw CliError(4, "degenerate labels: held-out part misses a class");
    return out;
}

double auc_on_test(AMFForest& forest, const BinarySplit& split) {
    std::vector<double> scores;
    scores.reserve(split.test.size());
    for (const Sample& s : split.test) scores.push_back(forest.predict_proba(s.x)[1]);
    return auc(scores, split.test_labels);
}

int cmd_auc(const Opts& o) {
    if (o.task != "clf") throw CliError(2, "auc requires --task clf");
    const Stream stream = load_stream(o);
    const int n_classes = resolve_classes(stream, o.n_classes);
    if (n_classes != 2) throw CliError(4, "auc requires binary labels, got " +
                                              std::to_string(n_classes) + " classes");
    const BinarySplit split = split_binary(stream, o.seed);
    AMFForest forest(forest_config(o, Task::classification, 2));
    DummyClassifier dummy(2);

    std::ostringstream buf;
    buf << "t,auc_amf,auc_dummy\n";
    for (std::size_t t = 1; t <= split.train.size(); ++t) {
        const Sample& s = split.train[t - 1];
        forest.partial_fit(s.x, s.y);
        dummy.partial_fit(s.y);
        if (t % o.stride == 0 || t == split.train.size()) {
            // The dummy scores every point identically, so its AUC is the
            // all-ties value 1/2; computed anyway for symmetry.
            std::vector<double> dummy_scores(split.test.size(), dummy.predict_proba()[1]);
            buf << t << ',' << fmt(auc_on_test(forest, split)) << ','
                << fmt(auc(dummy_scores, split.test_labels)) << '\n';
        }
    }
    write_output(buf.str(), o.out);
    return 0;
}

int cmd_trees_sweep(const Opts& o) {
    if (o.task != "clf") throw CliError(2, "trees-sweep requires --task clf");
    const Stream stream = load_stream(o);
    const int n_classes = resolve_classes(stream, o.n_classes);
    if (n_classes != 2) throw CliError(4, "trees-sweep requires binary labels");
    const BinarySplit split = split_binary(stream, o.seed);

    std::ostringstream buf;
    buf << "n_trees,auc\n";
    for (const int m : {1, 2, 5, 10, 20, 50}) {
        Opts mo = o;
        mo.n_trees = m;
        AMFForest forest(forest_config(mo, Task::classification, 2));
        for (const Sample& s : split.train) forest.partial_fit(s.x, s.y);
        buf << m << ',' << fmt(auc_on_test(forest, split)) << '\n';
    }
    write_output(buf.str(), o.out);
    return 0;
}

int cmd_mondrian_stats(const Opts& o) {
    const std::size_t reps = o.reps == 0 ? 1000 : o.reps;
    CellBox box{std::vector<double>(static_cast<std::size_t>(o.dim), 0.0),
                std::vector<double>(static_cast<std::size_t>(o.dim), 1.0)};
    RngStream rng(o.seed, 0x6d6f6e64ULL);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        const MondrianTree t = sample_mondrian_pruned(box, o.lambda, rng);
        const double leaves = static_cast<double>(t.leaf_count());
        sum += leaves;
        sum_sq += leaves * leaves;
    }
    const double mean = sum / static_cast<double>(reps);
    const double var = std::max(0.0, sum_sq / static_cast<double>(reps) - mean * mean);
    const double stderr_mean =
        reps > 1 ? std::sqrt(var / static_cast<double>(reps - 1)) : 0.0;
    const double expected = std::pow(1.0 + o.lambda, o.dim);

    std::ostringstream buf;
    buf << "mean_leaves,stderr_leaves,expected_leaves\n"
        << fmt(mean) << ',' << fmt(stderr_mean) << ',' << fmt(expected) << '\n';

    if (o.depth_profile > 0) {
        // Mean depth of the leaf receiving each point at insertion time, the
        // quantity that drives per-update cost.
        MondrianTree tree(o.dim, Task::regression);
        RngStream grow(o.seed, 0x64657074ULL);
        std::vector<double> x(static_cast<std::size_t>(o.dim));
        double depth_sum = 0.0;
        for (std::size_t i = 0; i < o.depth_profile; ++i) {
            for (double& v : x) v = grow.uniform_open01();
            const auto up = restricted_update(tree, x, grow);
            depth_sum += static_cast<double>(tree.depth_of(up.leaf));
        }
        const double mean_depth = depth_sum / static_cast<double>(o.depth_profile);
        // Logarithmic reference curve for eyeballing growth, not a guarantee:
        // a single run can land above it.
        const double m = static_cast<double>(o.n_trees);
        const double reference =
            std::log(static_cast<double>(o.depth_profile)) / std::log(2.0 * m / (2.0 * m - 1.0)) +
            2.0 * m;
        buf << "mean_depth,log_ref\n" << fmt(mean_depth) << ',' << fmt(reference) << '\n';
    }
    write_output(buf.str(), o.out);
    return 0;
}

int cmd_oracle_check(const Opts& o) {
    const std::size_t reps = o.reps == 0 ? 200 : o.reps;
    RngStream grow(o.seed, 0x6f726131ULL);
    RngStream query(o.seed, 0x6f726132ULL);
    double max_disc = 0.0;
    const auto note = [&max_disc](double d) {
        if (d > max_disc) max_disc = d;
    };

    for (std::size_t rep = 0; rep < reps; ++rep) {
        const int d = 1 + static_cast<int>(grow.uniform_open01() * 3.0);
        const int k = 2 + static_cast<int>(grow.uniform_open01() * 2.0);
        const std::size_t n_points = 2 + static_cast<std::size_t>(grow.uniform_open01() * 5.0);
        const std::size_t n_samples = n_points + static_cast<std::size_t>(grow.uniform_open01() * 24.0);

        std::vector<std::vector<double>> points(n_points, std::vector<double>(d));
        for (auto& p : points)
            for (double& v : p) v = grow.uniform_open01();

        MondrianTree tree(d, Task::classification, k);
        const LossKind kind{Loss::log_loss, 1.0};
        for (std::size_t t = 0; t < n_samples; ++t) {
            const std::size_t idx =
                t < n_points ? t
                             : static_cast<std::size_t>(grow.uniform_open01() *
                                                        static_cast<double>(n_points));
            const double y = std::floor(grow.uniform_open01() * k);
            const auto up = restricted_update(tree, points[idx], grow);
            update_weights_upward(tree, up.leaf, y, 1.0, kind);
        }
        if (o.inject_corruption) {
            for (NodeId id = 0; id < tree.node_count(); ++id)
                if (!tree.node(id).is_leaf()) tree.node(id).log_avg_weight += 0.7;
        }
        const std::vector<double> prior(static_cast<std::size_t>(k), 1.0 / k);

        for (const auto& p : points) {
            const auto fast = predict_aggregated(tree, p, std::nullopt, prior);
            const auto slow = oracle::brute_force_aggregate(tree, p);
            for (int c = 0; c < k; ++c) note(std::abs(fast[c] - slow[c]));
            note(std::abs(weighted_depth(tree, p) - oracle::brute_force_weighted_depth(tree, p)));
        }
        for (int q = 0; q < 3; ++q) {
            std::vector<double> x(d);
            for (double& v : x) v = -0.25 + 1.5 * query.uniform_open01();
            const auto vs = sample_virtual_split(tree, x, query);
            const auto fast = predict_aggregated(tree, x, vs, prior);
            const auto slow = vs ? oracle::brute_force_aggregate(
                                       oracle::materialize_virtual(tree, *vs, x), x)
                                 : oracle::brute_force_aggregate(tree, x);
            for (int c = 0; c < k; ++c) note(std::abs(fast[c] - slow[c]));
        }
    }

    std::ostringstream buf;
    buf << "reps,max_discrepancy\n" << reps << ',' << fmt(max_disc) << '\n';
    write_output(buf.str(), o.out);
    return max_disc <= 1e-10 ? 0 : 1;
}

void add_data_flags(CLI::App* cmd, Opts& o) {
    cmd->add_option("--data", o.data_path, "CSV input (features + label per row)");
    cmd->add_option("--synthetic", o.synthetic, "named generator: gauss2");
    cmd->add_option("--n", o.n, "synthetic stream length");
    cmd->add_option("--label-col", o.label_col,
                    "label column: index (negative from the end) or header name")
        ->capture_default_str();
}

void add_model_flags(CLI::App* cmd, Opts& o) {
    cmd->add_option("--task", o.task, "clf or reg")
        ->check(CLI::IsMember({"clf", "reg"}))
        ->capture_default_str();
    cmd->add_option("--n-classes", o.n_classes, "class count (0 = infer)");
    cmd->add_option("--range-bound", o.range_bound, "label bound B for reg")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--n-trees", o.n_trees, "trees in the forest")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    cmd->add_option("--eta", o.eta, "learning rate (0 = loss default)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
    cmd->add_option("--split-pure", o.split_pure, "split single-class nodes: on (faithful) or off")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"online aggregated Mondrian forests"};
    app.require_subcommand(1);
    Opts o;

    CLI::App* online = app.add_subcommand("online", "prequential loss curves vs dummy baseline");
    add_data_flags(online, o);
    add_model_flags(online, o);
    online->add_option("--out", o.out, "output path (default stdout)");

    CLI::App* auc_cmd = app.add_subcommand("auc", "held-out AUC during training");
    add_data_flags(auc_cmd, o);
    add_model_flags(auc_cmd, o);
    auc_cmd->add_option("--stride", o.stride, "evaluate every this many steps")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    auc_cmd->add_option("--out", o.out, "output path (default stdout)");

    CLI::App* sweep = app.add_subcommand("trees-sweep", "final AUC for several forest sizes");
    add_data_flags(sweep, o);
    add_model_flags(sweep, o);
    sweep->add_option("--out", o.out, "output path (default stdout)");

    CLI::App* mstats = app.add_subcommand("mondrian-stats", "Monte Carlo partition statistics");
    mstats->add_option("--dim", o.dim, "ambient dimension")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    mstats->add_option("--lambda", o.lambda, "partition lifetime")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mstats->add_option("--reps", o.reps, "Monte Carlo repetitions (default 1000)");
    mstats->add_option("--depth-profile", o.depth_profile,
                       "also grow an online tree on this many uniform points");
    o.n_trees = 10;  // forest commands default; mondrian-stats bound defaults to one tree
    mstats->add_option("--n-trees", o.n_trees, "tree count in the depth bound")
        ->check(CLI::Range(1, 1000000));
    mstats->add_option("--seed", o.seed, "random seed")->capture_default_str();
    mstats->add_option("--out", o.out, "output path (default stdout)");

    CLI::App* ocheck = app.add_subcommand("oracle-check",
                                          "certify fast aggregation against brute force");
    ocheck->add_option("--reps", o.reps, "random trees to check (default 200)");
    ocheck->add_option("--seed", o.seed, "random seed")->capture_default_str();
    ocheck->add_option("--out", o.out, "output path (default stdout)");
    ocheck->add_flag("--inject-corruption", o.inject_corruption,
                     "negative control: corrupt averaged weights before checking")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(online)) return cmd_online(o);
        if (app.got_subcommand(auc_cmd)) return cmd_auc(o);
        if (app.got_subcommand(sweep)) return cmd_trees_sweep(o);
        if (app.got_subcommand(mstats)) {
            if (mstats->count("--n-trees") == 0) o.n_trees = 1;
            return cmd_mondrian_stats(o);
        }
        if (app.got_subcommand(ocheck)) {
            if (ocheck->count("--reps") && o.reps == 0)
                throw CliError(2, "--reps must be at least 1");
            return cmd_oracle_check(o);
        }
        return 2;
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

}  // namespace amf::cli
