#include "oracles.hpp"

#include "tmicor/correlation.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/pair_set.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace tmicor;

namespace {

oracle::Rows random_rows(std::size_t n, std::size_t p, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    oracle::Rows x(n, std::vector<double>(p));
    for (auto& row : x) {
        for (auto& v : row) {
            v = g(rng);
        }
    }
    return x;
}

Matrix to_matrix(const oracle::Rows& x) {
    Matrix m(x.size(), x[0].size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < x[0].size(); ++j) {
            m(i, j) = x[i][j];
        }
    }
    return m;
}

std::vector<std::string> names(std::size_t p) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < p; ++j) {
        out.push_back("f" + std::to_string(j));
    }
    return out;
}

} // namespace

TEST_CASE("orthogonal columns have zero correlation") {
    Matrix block(4, 2);
    block << 1, 1, -1, 1, 1, -1, -1, -1;
    REQUIRE(standardize_columns(block));
    const Matrix r = gram_correlation(block);
    CHECK(r(0, 1) == 0.0);
    CHECK(r(1, 0) == 0.0);
    CHECK(r(0, 0) == 1.0);
}

TEST_CASE("duplicated column correlates to exactly one and saturates") {
    std::mt19937_64 rng(1);
    auto x = random_rows(12, 3, rng);
    for (auto& row : x) {
        row[2] = row[0];
    }
    Matrix m = to_matrix(x);
    REQUIRE(standardize_columns(m));
    const Matrix r = gram_correlation(m);
    CHECK(r(0, 2) == 1.0);
    CHECK(r(2, 0) == 1.0);
    CHECK_THROWS_AS(fisher_transform(r(0, 2)), SaturatedCorrelation);
    std::size_t saturated = 0;
    const double u = fisher_transform_clamped(r(0, 2), saturated);
    CHECK(saturated == 1);
    CHECK(std::isfinite(u));
    CHECK(u == doctest::Approx(std::atanh(1.0 - saturation_epsilon)));
}

TEST_CASE("correlation kernel matches the naive Pearson loop on a 20x8 matrix") {
    std::mt19937_64 rng(2);
    const auto x = random_rows(20, 8, rng);
    Matrix m = to_matrix(x);
    REQUIRE(standardize_columns(m));
    const Matrix r = gram_correlation(m);
    std::vector<std::size_t> rows(20);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    double worst = 0;
    for (std::size_t j = 0; j < 8; ++j) {
        for (std::size_t k = j + 1; k < 8; ++k) {
            worst = std::max(worst, std::abs(r(j, k) - oracle::pearson(x, rows, j, k)));
            CHECK(r(j, k) == r(k, j));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("per-class correlations match the naive loop") {
    std::mt19937_64 rng(3);
    const auto x = random_rows(40, 6, rng);
    std::vector<int> labels(40);
    for (std::size_t i = 0; i < 40; ++i) {
        labels[i] = (i % 3 == 0) ? 2 : 1;
    }
    ClassLabels y(labels);
    const auto s = standardize_within_class(DataMatrix(to_matrix(x), names(6)), y);
    const auto c = class_correlations(s, y);
    for (int cls = 1; cls <= 2; ++cls) {
        const Matrix& r = cls == 1 ? c.r1 : c.r2;
        const auto rows = y.rows_of(cls);
        for (std::size_t j = 0; j < 6; ++j) {
            for (std::size_t k = j + 1; k < 6; ++k) {
                CHECK(std::abs(r(j, k) - oracle::pearson(x, rows, j, k)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("Fisher transform values") {
    CHECK(fisher_transform(0.0) == 0.0);
    CHECK(fisher_transform(0.5) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-15));
    CHECK(fisher_transform(0.5) == doctest::Approx(0.5493061443).epsilon(1e-10));
    CHECK(fisher_transform(-0.5) == -fisher_transform(0.5));
}

TEST_CASE("pair statistic from given correlations") {
    Matrix r1 = Matrix::Identity(3, 3), r2 = Matrix::Identity(3, 3);
    r1(0, 1) = r1(1, 0) = 0.6;
    r2(0, 1) = r2(1, 0) = 0.3;
    const auto s = pair_statistics({r1, r2}, PairSet::all_pairs(3));
    REQUIRE(s.stats.size() == 3);
    const double expected = 0.5 * std::log(1.6 / 0.4) - 0.5 * std::log(1.3 / 0.7);
    CHECK(s.stats[0].t_value == doctest::Approx(expected).epsilon(1e-15));
    CHECK(s.stats[0].t_value == doctest::Approx(0.3836276).epsilon(1e-7));
    CHECK(s.stats[1].t_value == 0.0);
    CHECK(s.stats[2].t_value == 0.0);

    const auto same = pair_statistics({r1, r1}, PairSet::all_pairs(3));
    for (const auto& st : same.stats) {
        CHECK(st.t_value == 0.0);
    }
}

TEST_CASE("pair count and offset map") {
    CHECK(pair_count(663) == 219453);
    CHECK(pair_count(100) == 4950);
    CHECK(pair_count(1) == 0);
    const auto ps = PairSet::all_pairs(37);
    std::size_t expected = 0;
    bool ok = true;
    ps.for_each([&](std::size_t offset, std::size_t j, std::size_t k) {
        ok = ok && offset == expected && triangular_offset(j, k, 37) == offset && ps.at(offset) == std::make_pair(j, k);
        ++expected;
    });
    CHECK(ok);
    CHECK(expected == pair_count(37));
}

TEST_CASE("cross-set pairs") {
    const auto ps = PairSet::cross_set(6, {0, 2, 4}, {1, 5});
    CHECK(ps.size() == 6);
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    ps.for_each([&](std::size_t, std::size_t j, std::size_t k) { seen.emplace_back(j, k); });
    CHECK(seen == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 5}, {1, 2}, {1, 4}, {2, 5}, {4, 5}});
    CHECK_THROWS_AS(PairSet::cross_set(6, {0, 1}, {1, 2}), OverlappingSets);
    CHECK_THROWS_AS(PairSet::cross_set(6, {0, 1}, {}), ValidationError);
    CHECK_THROWS_AS(PairSet::cross_set(6, {0, 9}, {1}), UnknownFeature);
}

TEST_CASE("label swap negates T exactly") {
    std::mt19937_64 rng(4);
    const auto x = random_rows(30, 7, rng);
    std::vector<int> labels(30, 1);
    for (std::size_t i = 13; i < 30; ++i) {
        labels[i] = 2;
    }
    ClassLabels y(labels);
    DataMatrix dm(to_matrix(x), names(7));
    const auto a = compute_statistics(dm, y, PairSet::all_pairs(7));
    const auto b = compute_statistics(dm, y.swapped(), PairSet::all_pairs(7));
    for (std::size_t i = 0; i < a.stats.size(); ++i) {
        CHECK(b.stats[i].t_value == -a.stats[i].t_value);
    }
}

TEST_CASE("bivariate precision off-diagonal") {
    CHECK(bivariate_precision_offdiag(0.0, 1.0, 1.0) == 0.0);
    CHECK(bivariate_precision_offdiag(0.5, 1.0, 1.0) == doctest::Approx(-0.6666667).epsilon(1e-7));
    CHECK(bivariate_precision_offdiag(0.3, 2.0, 0.5) - bivariate_precision_offdiag(0.3, 2.0, 0.5) == 0.0);
    CHECK(bivariate_precision_offdiag(0.5, 2.0, 3.0) == doctest::Approx(-0.5 / (6.0 * 0.75)));
    CHECK_THROWS_AS(bivariate_precision_offdiag(1.0, 1.0, 1.0), SingularInput);
    CHECK_THROWS_AS(bivariate_precision_offdiag(0.2, 0.0, 1.0), DomainError);
}
