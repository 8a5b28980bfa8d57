#ifndef TMICOR_FDR_HPP
#define TMICOR_FDR_HPP

#include "tmicor/correlation.hpp"
#include "tmicor/null_pool.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tmicor {

enum class NullMethod { permutation, theoretical };

/**
 * @brief Estimated FDR for the top-l pairs, l = 1..L.
 *
 * Entry i describes rank i + 1. `pair_index` points into the statistic vector
 * the curve was built from. `fdr_hat` is `fdr_hat_raw` clamped to [0, 1].
 */
struct FdrCurve {
    std::vector<std::size_t> ranks;
    std::vector<std::size_t> pair_index;
    std::vector<double> thresholds;
    std::vector<double> numerator;
    std::vector<double> fdr_hat_raw;
    std::vector<double> fdr_hat;
    NullMethod method = NullMethod::permutation;
    bool monotone = false;

    std::size_t size() const { return ranks.size(); }
};

/// Indices of `stats` ordered by |T| descending; ties keep (j, k) order.
std::vector<std::size_t> rank_by_abs_t(const std::vector<PairStatistic>& stats);

/**
 * Permutation estimate: FDR(l) = [(1/A) #{|T*| > |T(l)|}] / l for l <= L,
 * counted with one sweep over the sorted pool. Throws `EmptyPool` for an empty
 * pool and `ValidationError` if L exceeds the number of pairs.
 */
FdrCurve estimate_fdr(const std::vector<PairStatistic>& stats, const NullPool& pool, std::size_t max_rank);

/**
 * Theoretical-null estimate: each null T is N(0, 1/(n1-3) + 1/(n2-3)), so
 * FDR(l) = #pairs * 2 Phi(-|T(l)| / s) / l.
 */
FdrCurve theoretical_fdr(const std::vector<PairStatistic>& stats, std::size_t n1, std::size_t n2,
                         std::size_t max_rank);

/// sqrt(1/(n1-3) + 1/(n2-3)).
double null_sd(std::size_t n1, std::size_t n2);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Replaces both FDR columns by their running maximum over rank.
void make_monotone(FdrCurve& curve);

/// TSV: rank, feature_j, feature_k, t, fdr_hat_raw, fdr_hat.
void write_fdr_report(std::ostream& out, const FdrCurve& curve, const std::vector<PairStatistic>& stats,
                      const std::vector<std::string>& names,
                      const std::vector<std::pair<std::string, std::string>>& header = {});

/// One parsed row of an FDR report.
struct FdrReportRow {
    std::size_t rank = 0;
    std::string feature_j;
    std::string feature_k;
    double t = 0;
    double fdr_hat_raw = 0;
    double fdr_hat = 0;
};

std::vector<FdrReportRow> read_fdr_report(std::istream& in);

} // namespace tmicor

#endif
