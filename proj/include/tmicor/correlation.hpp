#ifndef TMICOR_CORRELATION_HPP
#define TMICOR_CORRELATION_HPP

#include "tmicor/data.hpp"
#include "tmicor/pair_set.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tmicor {

/// Correlations at or beyond 1 - saturation_epsilon are clamped before arctanh.
inline constexpr double saturation_epsilon = 1e-12;

/// Per-class sample correlation matrices.
struct CorrelationPair {
    Matrix r1;
    Matrix r2;
};

/**
 * @brief Difference of Fisher-transformed class correlations for one pair.
 *
 * Positive `t_value` means the class-1 correlation exceeds the class-2 one.
 */
struct PairStatistic {
    std::size_t j = 0;
    std::size_t k = 0;
    double t_value = 0;
    double u1 = 0;
    double u2 = 0;
    double r1 = 0;
    double r2 = 0;
};

struct StatisticSet {
    std::vector<PairStatistic> stats;
    /// Number of correlations clamped to +/-(1 - saturation_epsilon).
    std::size_t saturated = 0;
};

/**
 * Correlation matrix of the rows in `block` assuming the columns are already
 * centred and scaled: (1/rows) * block^T block, computed as a blocked
 * symmetric rank update. Entries are clamped to [-1, 1], the diagonal is set
 * to exactly 1 and the result is exactly symmetric.
 */
Matrix gram_correlation(const Matrix& block);

/// Centres and scales every column of `block` (divisor = rows) in place.
/// Returns false if a column has zero variance, leaving `block` partially scaled.
bool standardize_columns(Matrix& block);

/// Rows `rows` of `values`, in the given order.
Matrix gather_rows(const Matrix& values, std::span<const std::size_t> rows);

/// Per-class correlations: each class row block is centred and scaled (divisor
/// n_m) and passed through `gram_correlation`.
CorrelationPair class_correlations(const StandardizedMatrix& xstd, const ClassLabels& y);

/// arctanh(r). Throws `SaturatedCorrelation` when |r| >= 1 - saturation_epsilon.
double fisher_transform(double r);

/// arctanh(r) with |r| clamped to 1 - saturation_epsilon; bumps `saturated` when clamping.
double fisher_transform_clamped(double r, std::size_t& saturated);

/// T = arctanh(R1) - arctanh(R2) for each pair, in the pair set's order.
StatisticSet pair_statistics(const CorrelationPair& corr, const PairSet& pairs);

/// Writes |T| for each pair into `out` (size == pairs.size()); returns the saturation count.
std::size_t abs_pair_statistics(const Matrix& r1, const Matrix& r2, const PairSet& pairs, std::span<double> out);

/// Standardize within class, correlate, and build the pair statistics.
StatisticSet compute_statistics(const DataMatrix& x, const ClassLabels& y, const PairSet& pairs);

/**
 * Off-diagonal element of the inverse of a 2x2 covariance with correlation `r`
 * and standard deviations `sj`, `sk`: -r / (sj sk (1 - r^2)).
 * Throws `SingularInput` for |r| >= 1 and `DomainError` for non-positive sds.
 */
double bivariate_precision_offdiag(double r, double sj, double sk);

/// TSV with columns feature_j, feature_k, r1, r2, u1, u2, t, after a "# key=value" header.
void write_statistics_tsv(std::ostream& out, const std::vector<PairStatistic>& stats,
                          const std::vector<std::string>& names,
                          const std::vector<std::pair<std::string, std::string>>& header = {});

} // namespace tmicor

#endif
