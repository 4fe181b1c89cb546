#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/cli_app.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("amf");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return amf::cli::cli_main(static_cast<int>(argv.size()), argv.data());
}

// Scratch directory for CSV inputs and --out captures, removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("amf_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream(p) << content;
        return p.string();
    }
    std::string out(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

// Ten rows, two features, binary label in the last column.
constexpr const char* kTinyBinary =
    "0.1,0.2,0\n0.9,0.8,1\n0.2,0.1,0\n0.8,0.9,1\n0.15,0.25,0\n"
    "0.85,0.75,1\n0.3,0.2,0\n0.7,0.8,1\n0.25,0.3,0\n0.75,0.7,1\n";

}  // namespace

TEST_CASE("help and argument errors use the documented exit codes") {
    CHECK(run_cli({"--help"}) == 0);
    CHECK(run_cli({}) == 2);                              // subcommand required
    CHECK(run_cli({"online", "--no-such-flag"}) == 2);    // unknown option
    CHECK(run_cli({"online"}) == 2);                      // no data source
    CHECK(run_cli({"online", "--data", "a.csv", "--synthetic", "gauss2", "--n", "10"}) == 2);
    CHECK(run_cli({"online", "--synthetic", "nope", "--n", "10"}) == 2);
    CHECK(run_cli({"online", "--synthetic", "gauss2"}) == 2);  // --n missing
    CHECK(run_cli({"online", "--synthetic", "gauss2", "--n", "10", "--n-trees", "0"}) == 2);
}

TEST_CASE("file problems map to exit 2, bad cells to exit 3, thin labels to exit 4") {
    TempDir dir;
    const std::string out = dir.out("o.csv");

    CHECK(run_cli({"online", "--data", dir.path / "missing.csv", "--out", out}) == 2);
    CHECK(run_cli({"online", "--data", dir.file("empty.csv", ""), "--out", out}) == 2);
    CHECK(run_cli({"online", "--data", dir.file("one_col.csv", "1\n2\n"), "--out", out}) == 2);
    CHECK(run_cli({"online", "--data",
                   dir.file("ragged.csv", "0.1,0.2,0\n0.3,0.4\n"), "--out", out}) == 2);
    CHECK(run_cli({"online", "--data",
                   dir.file("header_only.csv", "a,b,y\n"), "--out", out}) == 2);

    // Non-numeric cells past the first row are data errors, not headers.
    CHECK(run_cli({"online", "--data",
                   dir.file("text.csv", "0.1,0.2,0\n0.3,oops,1\n"), "--out", out}) == 3);
    CHECK(run_cli({"online", "--data",
                   dir.file("inf.csv", "0.1,0.2,0\n0.3,inf,1\n"), "--out", out}) == 3);
    CHECK(run_cli({"online", "--data",
                   dir.file("nan.csv", "0.1,0.5,0\n0.3,nan,1\n"), "--out", out}) == 3);

    // All-zero labels infer a single class; all-one labels would infer two.
    CHECK(run_cli({"online", "--data",
                   dir.file("one_class.csv", "0.1,0.2,0\n0.3,0.4,0\n"), "--out", out}) == 4);
    CHECK(run_cli({"auc", "--data",
                   dir.file("three.csv", "0.1,0.2,0\n0.3,0.4,1\n0.5,0.6,2\n"),
                   "--out", out}) == 4);
    // Fractional classification labels are malformed input, not degenerate.
    CHECK(run_cli({"online", "--data",
                   dir.file("frac.csv", "0.1,0.2,0.5\n0.3,0.4,1\n"), "--out", out}) == 2);
}

TEST_CASE("oracle check passes clean and fails its negative control") {
    TempDir dir;
    const std::string out = dir.out("oracle.csv");
    CHECK(run_cli({"oracle-check", "--reps", "20", "--seed", "3", "--out", out}) == 0);

    const std::string text = slurp(out);
    CHECK(first_line(text) == "reps,max_discrepancy");
    std::istringstream row(text.substr(text.find('\n') + 1));
    std::string reps_field, disc_field;
    std::getline(row, reps_field, ',');
    std::getline(row, disc_field);
    CHECK(reps_field == "20");
    CHECK(std::stod(disc_field) <= 1e-10);

    CHECK(run_cli({"oracle-check", "--reps", "5", "--seed", "3", "--inject-corruption",
                   "--out", dir.out("bad.csv")}) == 1);
}

TEST_CASE("each command emits its documented header") {
    TempDir dir;
    const std::string data = dir.file("bin.csv", kTinyBinary);

    const std::string online_out = dir.out("online.csv");
    REQUIRE(run_cli({"online", "--data", data, "--out", online_out}) == 0);
    const std::string online_text = slurp(online_out);
    CHECK(first_line(online_text) == "t,avg_loss_amf,avg_loss_dummy");
    // One row per sample plus the header.
    CHECK(std::count(online_text.begin(), online_text.end(), '\n') == 11);

    const std::string auc_out = dir.out("auc.csv");
    REQUIRE(run_cli({"auc", "--synthetic", "gauss2", "--n", "120", "--stride", "50",
                     "--out", auc_out}) == 0);
    CHECK(first_line(slurp(auc_out)) == "t,auc_amf,auc_dummy");

    const std::string sweep_out = dir.out("sweep.csv");
    REQUIRE(run_cli({"trees-sweep", "--synthetic", "gauss2", "--n", "80",
                     "--out", sweep_out}) == 0);
    const std::string sweep_text = slurp(sweep_out);
    CHECK(first_line(sweep_text) == "n_trees,auc");
    CHECK(std::count(sweep_text.begin(), sweep_text.end(), '\n') == 7);

    const std::string mstats_out = dir.out("mstats.csv");
    REQUIRE(run_cli({"mondrian-stats", "--dim", "1", "--lambda", "1", "--reps", "200",
                     "--out", mstats_out}) == 0);
    CHECK(first_line(slurp(mstats_out)) == "mean_leaves,stderr_leaves,expected_leaves");

    const std::string depth_out = dir.out("depth.csv");
    REQUIRE(run_cli({"mondrian-stats", "--dim", "2", "--reps", "50", "--depth-profile",
                     "200", "--out", depth_out}) == 0);
    CHECK(slurp(depth_out).find("mean_depth,log_ref") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical output") {
    TempDir dir;
    const std::vector<std::string> base = {"online", "--synthetic", "gauss2", "--n", "150",
                                           "--seed", "11", "--n-trees", "5"};
    auto with_out = [&base](const std::string& out) {
        std::vector<std::string> args = base;
        args.insert(args.end(), {"--out", out});
        return args;
    };
    const std::string a = dir.out("a.csv"), b = dir.out("b.csv");
    REQUIRE(run_cli(with_out(a)) == 0);
    REQUIRE(run_cli(with_out(b)) == 0);
    const std::string text_a = slurp(a);
    CHECK(text_a == slurp(b));
    CHECK(!text_a.empty());

    // A different seed must change the curve.
    std::vector<std::string> other = with_out(dir.out("c.csv"));
    other[6] = "12";
    REQUIRE(run_cli(other) == 0);
    CHECK(text_a != slurp(dir.out("c.csv")));
}

TEST_CASE("label column selection by index and by header name agree") {
    TempDir dir;
    // Same six samples with the label leading, trailing, and named.
    const std::string label_first =
        "0,0.1,0.2\n1,0.9,0.8\n0,0.2,0.1\n1,0.8,0.9\n0,0.3,0.2\n1,0.7,0.8\n";
    const std::string label_last =
        "0.1,0.2,0\n0.9,0.8,1\n0.2,0.1,0\n0.8,0.9,1\n0.3,0.2,0\n0.7,0.8,1\n";
    const std::string named = "f1,f2,target\n" + label_last;

    const std::string out_first = dir.out("first.csv");
    const std::string out_last = dir.out("last.csv");
    const std::string out_named = dir.out("named.csv");
    REQUIRE(run_cli({"online", "--data", dir.file("lf.csv", label_first), "--label-col", "0",
                     "--out", out_first}) == 0);
    REQUIRE(run_cli({"online", "--data", dir.file("ll.csv", label_last), "--label-col", "-1",
                     "--out", out_last}) == 0);
    REQUIRE(run_cli({"online", "--data", dir.file("nm.csv", named), "--label-col", "target",
                     "--out", out_named}) == 0);

    const std::string reference = slurp(out_last);
    CHECK(slurp(out_first) == reference);
    CHECK(slurp(out_named) == reference);

    // Name without a header, or an index off the end, cannot resolve.
    CHECK(run_cli({"online", "--data", dir.file("ll2.csv", label_last), "--label-col",
                   "target", "--out", dir.out("x.csv")}) == 2);
    CHECK(run_cli({"online", "--data", dir.file("ll3.csv", label_last), "--label-col", "7",
                   "--out", dir.out("y.csv")}) == 2);
}

TEST_CASE("regression stream round trip") {
    TempDir dir;
    const std::string data = dir.file(
        "reg.csv", "0.1,0.2,0.5\n0.9,0.8,-0.3\n0.2,0.6,0.1\n0.7,0.3,0.9\n");
    const std::string out = dir.out("reg_out.csv");
    REQUIRE(run_cli({"online", "--data", data, "--task", "reg", "--out", out}) == 0);
    CHECK(first_line(slurp(out)) == "t,avg_loss_amf,avg_loss_dummy");

    // Labels outside [-B, B] are rejected up front.
    CHECK(run_cli({"online", "--data", data, "--task", "reg", "--range-bound", "0.4",
                   "--out", dir.out("z.csv")}) == 2);
}
