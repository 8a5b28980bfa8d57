#include "oracles.hpp"

#include "tmicor/errors.hpp"
#include "tmicor/simulate.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <sstream>

using namespace tmicor;

TEST_CASE("equicorrelated block eigenvalues") {
    SimulationConfig cfg;
    cfg.blocks = 2;
    cfg.block_size = 10;
    cfg.rho = {0.3};
    cfg.rho1_tilde = 0.0;
    const auto cov = build_covariances(cfg);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov.sigma1.topLeftCorner(10, 10));
    const auto ev = es.eigenvalues();
    CHECK(ev(9) == doctest::Approx(3.7).epsilon(1e-12));
    for (int i = 0; i < 9; ++i) {
        CHECK(ev(i) == doctest::Approx(0.7).epsilon(1e-12));
    }
    CHECK(cov.sigma1(0, 15) == 0.0);
    CHECK(cov.sigma1(12, 15) == doctest::Approx(0.3));
    CHECK(cov.sigma2(0, 1) == 0.0);
    CHECK(cov.sigma2(12, 15) == doctest::Approx(0.3));

    cfg.rho1_tilde = 0.3;
    const auto same = build_covariances(cfg);
    CHECK(same.sigma1 == same.sigma2);
}

TEST_CASE("infeasible block correlation") {
    SimulationConfig cfg;
    cfg.rho = {-0.2};
    CHECK_THROWS_AS(cfg.validate(), NotPositiveDefinite);
    cfg.rho = {0.3};
    cfg.rho1_tilde = 1.0;
    CHECK_THROWS_AS(cfg.validate(), NotPositiveDefinite);
}

TEST_CASE("sampling: covariance, shape and determinism") {
    const Matrix eye = Matrix::Identity(5, 5);
    Rng rng(31);
    const auto x = sample_class(eye, Vector::Zero(5), 10000, rng);
    const Matrix centered = x.values().rowwise() - x.values().colwise().mean();
    const Matrix cov = centered.transpose() * centered / 10000.0;
    CHECK((cov - eye).cwiseAbs().maxCoeff() < 0.06);

    Rng r1(5), r2(5);
    const auto one = sample_class(eye, Vector::Zero(5), 1, r1);
    CHECK(one.n() == 1);
    CHECK(one.values().allFinite());
    const auto again = sample_class(eye, Vector::Zero(5), 1, r2);
    CHECK(one.values() == again.values());

    SimulationConfig cfg;
    cfg.blocks = 3;
    cfg.block_size = 4;
    cfg.n_per_class = 20;
    const auto a = simulate_trial_data(cfg, 99);
    const auto b = simulate_trial_data(cfg, 99);
    CHECK(a.x.values() == b.x.values());
    CHECK(a.y.n1() == 20);
    CHECK(a.y.n2() == 20);
}

TEST_CASE("alternative set is the within-first-block pairs") {
    SimulationConfig cfg;
    cfg.blocks = 3;
    cfg.block_size = 4;
    CHECK(is_alternative(cfg, 0, 3));
    CHECK_FALSE(is_alternative(cfg, 0, 4));
    CHECK_FALSE(is_alternative(cfg, 4, 5));
    cfg.rho1_tilde = 0.3;
    CHECK_FALSE(is_alternative(cfg, 0, 3));
}

TEST_CASE("true FDR curve") {
    const auto c = true_fdr_curve({true, true, false, true, false});
    CHECK(c == std::vector<double>{0.0, 0.0, 1.0 / 3.0, 0.25, 0.4});
}

TEST_CASE("global null: true FDR is one and estimated FDR is high") {
    SimulationConfig cfg;
    cfg.rho1_tilde = 0.3;
    cfg.trials = 10;
    cfg.run_logistic = false;
    cfg.max_rank = 45;
    cfg.seed = 77;
    const auto res = run_experiment(cfg);
    for (double v : res.true_tmicor.mean) {
        CHECK(v == 1.0);
    }
    CHECK(res.est_tmicor.mean[44] >= 0.5);
}

TEST_CASE("trials are deterministic and TMIcor is invariant to the mean shift") {
    SimulationConfig cfg;
    cfg.blocks = 4;
    cfg.block_size = 5;
    cfg.n_per_class = 60;
    cfg.trials = 3;
    cfg.permutations = 20;
    cfg.max_rank = 30;
    cfg.seed = 8;
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    CHECK(a.true_tmicor.mean == b.true_tmicor.mean);
    CHECK(a.est_logistic.mean == b.est_logistic.mean);
    for (double shift : {0.5, 1.0}) {
        cfg.mean_shift = shift;
        const auto c = run_experiment(cfg);
        for (std::size_t t = 0; t < 3; ++t) {
            CHECK(c.trials[t].fdr_true_tmicor == a.trials[t].fdr_true_tmicor);
            CHECK(c.trials[t].fdr_est_tmicor == a.trials[t].fdr_est_tmicor);
        }
    }
}

TEST_CASE("summary uses the standard error of the mean") {
    const auto s = summarize({{1.0, 0.0}, {3.0, 0.0}});
    CHECK(s.mean == std::vector<double>{2.0, 0.0});
    CHECK(s.se[0] == doctest::Approx(1.0));
    CHECK(s.se[1] == 0.0);
}

TEST_CASE("config parsing") {
    std::istringstream in("# experiment\nblocks = 5\nblock_size=4\nrho = 0.2, 0.1, 0.3, 0.3, 0.3\nrho1_tilde = 0\n"
                          "mean_shift = 1\nn_per_class = 50\ntrials = 2\nseed = 12\nmode = raw\n");
    const auto cfg = parse_simulation_config(in);
    CHECK(cfg.blocks == 5);
    CHECK(cfg.block_size == 4);
    CHECK(cfg.rho_of(1) == 0.1);
    CHECK(cfg.mean_shift == 1.0);
    CHECK(cfg.seed == 12);
    CHECK(cfg.mode == PermutationMode::raw);

    std::stringstream echo;
    for (const auto& [k, v] : describe(cfg)) {
        echo << k << " = " << v << '\n';
    }
    const auto back = parse_simulation_config(echo);
    CHECK(describe(back) == describe(cfg));

    std::istringstream unknown("colour = red\n");
    CHECK_THROWS_AS(parse_simulation_config(unknown), ValidationError);
    std::istringstream broken("blocks 5\n");
    CHECK_THROWS_AS(parse_simulation_config(broken), ParseError);
}

TEST_CASE("probe rows") {
    SimulationConfig base;
    base.block_size = 10;
    base.rho = {0.3};
    base.permutations = 5;
    const auto rows = consistency_probe({20}, {100, 200}, base, 2, 4);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.p == 20);
        CHECK(r.max_null_abs_t > 0);
        CHECK(r.min_alt_abs_t > 0);
        CHECK(r.max_perm_abs_t > 0);
        CHECK(r.rate == doctest::Approx(std::sqrt(std::log(20.0) / static_cast<double>(r.n))));
    }
    CHECK_THROWS_AS(consistency_probe({15}, {100}, base, 1, 4), ValidationError);
}
