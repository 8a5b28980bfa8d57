#include "oracles.hpp"

#include "tmicor/cli.hpp"
#include "tmicor/data.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/pair_set.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace tmicor;
namespace fs = std::filesystem;

namespace {

// Writes a 40-sample, 6-feature table plus a sidecar label file.
fs::path make_inputs(const std::string& name) {
    const auto dir = oracle::scratch_dir(name);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    std::ostringstream data, labels;
    data << "g0\tg1\tg2\tg3\tg4\tage\n";
    labels << "class\n";
    for (int i = 0; i < 40; ++i) {
        const int cls = i < 20 ? 1 : 2;
        double v[6];
        for (auto& x : v) {
            x = g(rng);
        }
        if (cls == 2) {
            v[1] = 0.9 * v[0] + 0.3 * v[1];
        }
        data << v[0] << '\t' << v[1] << '\t' << v[2] << '\t' << v[3] << '\t' << v[4] << '\t' << 40 + 10 * v[5] << '\n';
        labels << cls - 1 << '\n';
    }
    oracle::write_file(dir / "X.tsv", data.str());
    oracle::write_file(dir / "y.tsv", labels.str());
    return dir;
}

int run(std::vector<std::string> args, std::string* log_text = nullptr) {
    std::ostringstream out, log;
    const int rc = run_cli(args, out, log);
    if (log_text) {
        *log_text = log.str() + out.str();
    }
    return rc;
}

} // namespace

TEST_CASE("missing --data is a usage error naming the flag") {
    std::string log;
    CHECK(run({"test", "--labels", "y.tsv"}, &log) == 2);
    CHECK(log.find("--data") != std::string::npos);
    CHECK(run({}, &log) == 2);
    CHECK(run({"--help"}, &log) == 0);
    CHECK(run({"--version"}, &log) == 0);
    CHECK(log.find(version_string) != std::string::npos);
}

TEST_CASE("happy path, determinism and thread invariance") {
    const auto dir = make_inputs("cli_happy");
    const std::vector<std::string> base{"test", "--data", (dir / "X.tsv").string(), "--labels", (dir / "y.tsv").string(),
                                        "--permutations", "100", "--seed", "42", "--dump-null"};
    auto with = [&](std::vector<std::string> extra) {
        auto a = base;
        a.insert(a.end(), extra.begin(), extra.end());
        return a;
    };
    REQUIRE(run(with({"--out", (dir / "a").string(), "--threads", "1"})) == 0);
    REQUIRE(run(with({"--out", (dir / "b").string(), "--threads", "1"})) == 0);
    REQUIRE(run(with({"--out", (dir / "c").string(), "--threads", "4"})) == 0);
    for (const char* f : {"statistics.tsv", "fdr.tsv", "manifest.txt", "null_pool.bin"}) {
        const auto a = oracle::slurp(dir / "a" / f);
        CHECK(!a.empty());
        CHECK(a == oracle::slurp(dir / "b" / f));
        CHECK(a == oracle::slurp(dir / "c" / f));
    }
    const auto fdr = oracle::slurp(dir / "a" / "fdr.tsv");
    CHECK(fdr.find("rank\tfeature_j\tfeature_k\tt\tfdr_hat_raw\tfdr_hat\n1\tg0\tg1\t") != std::string::npos);
    const auto manifest = read_manifest((dir / "a" / "manifest.txt").string());
    CHECK(manifest.at("seed") == "42");
    CHECK(manifest.at("command") == "test");
    CHECK(manifest.at("stat.pairs") == "15");
    CHECK(manifest.count("out") == 0);

    SUBCASE("rerun from the manifest reproduces every output") {
        REQUIRE(run({"rerun", "--manifest", (dir / "a" / "manifest.txt").string(), "--out", (dir / "r").string()}) == 0);
        for (const char* f : {"statistics.tsv", "fdr.tsv", "manifest.txt", "null_pool.bin"}) {
            CHECK(oracle::slurp(dir / "a" / f) == oracle::slurp(dir / "r" / f));
        }
    }
    SUBCASE("graph from the report") {
        const auto out = dir / "g.dot";
        REQUIRE(run({"graph", "--fdr-report", (dir / "a" / "fdr.tsv").string(), "--cutoff", "0.1", "--graph-format",
                     "dot", "--output", out.string()}) == 0);
        CHECK(oracle::slurp(out).find("\"g0\" -- \"g1\"") != std::string::npos);
    }
    SUBCASE("nuisance adjustment and theoretical null") {
        CHECK(run(with({"--out", (dir / "n").string(), "--nuisance", "age", "--null", "theoretical"})) == 0);
        const auto stats = oracle::slurp(dir / "n" / "statistics.tsv");
        CHECK(stats.find("\tage\t") == std::string::npos);
        std::string log;
        CHECK(run(with({"--out", (dir / "n2").string(), "--nuisance", "weight"}), &log) == 2);
        CHECK(log.find("weight") != std::string::npos);
    }
    SUBCASE("baseline") {
        REQUIRE(run({"baseline", "--data", (dir / "X.tsv").string(), "--labels", (dir / "y.tsv").string(), "--out",
                     (dir / "bl").string()}) == 0);
        CHECK(oracle::slurp(dir / "bl" / "baseline.tsv").find("gamma_hat") != std::string::npos);
    }
    SUBCASE("invalid option values are usage errors") {
        CHECK(run(with({"--out", (dir / "x").string(), "--mode", "sideways"})) == 2);
        CHECK(run(with({"--out", (dir / "x").string(), "--cutoff", "0"})) == 2);
        CHECK(run({"test", "--data", (dir / "missing.tsv").string(), "--labels", "y"}) == 2);
    }
}

TEST_CASE("cross-set file parsing") {
    const auto dir = oracle::scratch_dir("cross");
    DataMatrix x(Matrix::Zero(5, 5), {"a", "b", "c", "d", "e"});
    oracle::write_file(dir / "ok.tsv", "a\tA\nb\tA\nc\tA\nd\tB\ne\tB\n");
    CHECK(parse_cross_set((dir / "ok.tsv").string(), x).size() == 6);
    oracle::write_file(dir / "overlap.tsv", "a\tA\nb\tA\na\tB\nd\tB\n");
    CHECK_THROWS_AS(parse_cross_set((dir / "overlap.tsv").string(), x), OverlappingSets);
    oracle::write_file(dir / "emptyb.tsv", "a\tA\nb\tA\n");
    CHECK_THROWS_AS(parse_cross_set((dir / "emptyb.tsv").string(), x), ValidationError);
    oracle::write_file(dir / "tag.tsv", "a\tA\nb\tC\n");
    CHECK_THROWS_AS(parse_cross_set((dir / "tag.tsv").string(), x), ParseError);
    oracle::write_file(dir / "name.tsv", "a\tA\nzz\tB\n");
    CHECK_THROWS_AS(parse_cross_set((dir / "name.tsv").string(), x), UnknownFeature);
}

TEST_CASE("simulate subcommand writes curves and reruns identically") {
    const auto dir = oracle::scratch_dir("cli_sim");
    oracle::write_file(dir / "exp.cfg", "blocks = 3\nblock_size = 4\nn_per_class = 30\ntrials = 2\npermutations = 10\n"
                                        "max_rank = 20\nseed = 5\n");
    REQUIRE(run({"simulate", "--config", (dir / "exp.cfg").string(), "--out", (dir / "s").string()}) == 0);
    const auto tsv = oracle::slurp(dir / "s" / "simulation.tsv");
    CHECK(tsv.find("rank\tfdr_est_tmicor\tfdr_true_tmicor") != std::string::npos);
    CHECK(fs::exists(dir / "s" / "simulation_plot.csv"));
    REQUIRE(run({"rerun", "--manifest", (dir / "s" / "manifest.txt").string(), "--out", (dir / "r").string()}) == 0);
    CHECK(oracle::slurp(dir / "r" / "simulation.tsv") == tsv);
}
