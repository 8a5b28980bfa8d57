#include "tmicor/correlation.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/table_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace tmicor {

Matrix gram_correlation(const Matrix& block) {
    const auto p = block.cols();
    const double scale = 1.0 / static_cast<double>(block.rows());
    Matrix r = Matrix::Zero(p, p);
    r.selfadjointView<Eigen::Lower>().rankUpdate(block.adjoint(), scale);
    for (Eigen::Index k = 0; k < p; ++k) {
        r(k, k) = 1.0;
        for (Eigen::Index j = k + 1; j < p; ++j) {
            const double v = std::clamp(r(j, k), -1.0, 1.0);
            r(j, k) = v;
            r(k, j) = v;
        }
    }
    return r;
}

bool standardize_columns(Matrix& block) {
    const double count = static_cast<double>(block.rows());
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
        auto col = block.col(j);
        double sum = 0;
        double max_abs = 0;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            sum += col[i];
            max_abs = std::max(max_abs, std::abs(col[i]));
        }
        const double mean = sum / count;
        double ss = 0;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            const double d = col[i] - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / count);
        if (sd == 0 || sd <= 1e-12 * max_abs) {
            return false;
        }
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            col[i] = (col[i] - mean) / sd;
        }
    }
    return true;
}

Matrix gather_rows(const Matrix& values, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), values.cols());
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out(static_cast<Eigen::Index>(i), j) = values(static_cast<Eigen::Index>(rows[i]), j);
        }
    }
    return out;
}

CorrelationPair class_correlations(const StandardizedMatrix& xstd, const ClassLabels& y) {
    if (static_cast<std::size_t>(xstd.values.rows()) != y.n()) {
        throw ShapeError("standardized matrix and labels disagree on sample count");
    }
    // Each class block is re-standardized in place: a no-op up to rounding for
    // standardized input, and the same arithmetic the permutation loop applies,
    // so an identity relabeling reproduces these matrices bit for bit.
    CorrelationPair out;
    for (int cls = 1; cls <= 2; ++cls) {
        Matrix block = gather_rows(xstd.values, y.rows_of(cls));
        if (!standardize_columns(block)) {
            throw DegenerateFeature("constant column in class " + std::to_string(cls), {});
        }
        (cls == 1 ? out.r1 : out.r2) = gram_correlation(block);
    }
    return out;
}

double fisher_transform(double r) {
    if (!(std::abs(r) < 1.0 - saturation_epsilon)) {
        throw SaturatedCorrelation("correlation " + format_double(r) + " is saturated");
    }
    return std::atanh(r);
}

double fisher_transform_clamped(double r, std::size_t& saturated) {
    constexpr double limit = 1.0 - saturation_epsilon;
    if (r >= limit) {
        ++saturated;
        return std::atanh(limit);
    }
    if (r <= -limit) {
        ++saturated;
        return -std::atanh(limit);
    }
    return std::atanh(r);
}

StatisticSet pair_statistics(const CorrelationPair& corr, const PairSet& pairs) {
    if (static_cast<std::size_t>(corr.r1.rows()) != pairs.p() || static_cast<std::size_t>(corr.r2.rows()) != pairs.p()) {
        throw ShapeError("correlation matrices do not match the pair set dimension");
    }
    StatisticSet out;
    out.stats.resize(pairs.size());
    const auto total = static_cast<std::ptrdiff_t>(pairs.size());
    std::size_t saturated = 0;
#pragma omp parallel for schedule(static) reduction(+ : saturated)
    for (std::ptrdiff_t o = 0; o < total; ++o) {
        const auto [j, k] = pairs.at(static_cast<std::size_t>(o));
        PairStatistic s;
        s.j = j;
        s.k = k;
        s.r1 = corr.r1(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        s.r2 = corr.r2(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        s.u1 = fisher_transform_clamped(s.r1, saturated);
        s.u2 = fisher_transform_clamped(s.r2, saturated);
        s.t_value = s.u1 - s.u2;
        out.stats[static_cast<std::size_t>(o)] = s;
    }
    out.saturated = saturated;
    return out;
}

std::size_t abs_pair_statistics(const Matrix& r1, const Matrix& r2, const PairSet& pairs, std::span<double> out) {
    if (out.size() != pairs.size()) {
        throw ShapeError("output span does not match the pair count");
    }
    std::size_t saturated = 0;
    pairs.for_each([&](std::size_t o, std::size_t j, std::size_t k) {
        const auto jj = static_cast<Eigen::Index>(j);
        const auto kk = static_cast<Eigen::Index>(k);
        out[o] = std::abs(fisher_transform_clamped(r1(kk, jj), saturated) - fisher_transform_clamped(r2(kk, jj), saturated));
    });
    return saturated;
}

StatisticSet compute_statistics(const DataMatrix& x, const ClassLabels& y, const PairSet& pairs) {
    return pair_statistics(class_correlations(standardize_within_class(x, y), y), pairs);
}

double bivariate_precision_offdiag(double r, double sj, double sk) {
    if (!(std::abs(r) < 1.0)) {
        throw SingularInput("bivariate covariance is singular for |r| >= 1");
    }
    if (!(sj > 0) || !(sk > 0)) {
        throw DomainError("standard deviations must be positive");
    }
    return -r / (sj * sk * (1.0 - r * r));
}

void write_statistics_tsv(std::ostream& out, const std::vector<PairStatistic>& stats,
                          const std::vector<std::string>& names,
                          const std::vector<std::pair<std::string, std::string>>& header) {
    write_comment_header(out, header);
    out << "feature_j\tfeature_k\tr1\tr2\tu1\tu2\tt\n";
    for (const auto& s : stats) {
        out << names[s.j] << '\t' << names[s.k] << '\t' << format_double(s.r1) << '\t' << format_double(s.r2) << '\t'
            << format_double(s.u1) << '\t' << format_double(s.u2) << '\t' << format_double(s.t_value) << '\n';
    }
}

} // namespace tmicor
