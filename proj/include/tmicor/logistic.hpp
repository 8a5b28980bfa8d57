#ifndef TMICOR_LOGISTIC_HPP
#define TMICOR_LOGISTIC_HPP

#include "tmicor/data.hpp"
#include "tmicor/pair_set.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tmicor {

/**
 * @brief Fit of logit P(y = 1) = b0 + bj xj + bk xk + g xj xk.
 *
 * Coefficients are on the original predictor scale. When the data are
 * separated the Wald test is unusable and `p_value` is reported as 1.
 */
struct LogisticFit {
    double beta0 = 0;
    double beta_j = 0;
    double beta_k = 0;
    double gamma_jk = 0;
    double se_gamma = 0;
    double p_value = 1;
    double log_likelihood = 0;
    /// Max-norm of the score on the internally standardized design.
    double max_score = 0;
    unsigned iterations = 0;
    bool converged = false;
    bool separated = false;
};

struct LogisticOptions {
    unsigned max_iterations = 50;
    double gradient_tol = 1e-8;
    double loglik_rel_tol = 1e-10;
    /// Any |linear predictor| above this flags separation.
    double separation_eta = 30;
};

/// `outcome` holds 0/1 responses.
LogisticFit fit_pair_logistic(std::span<const double> xj, std::span<const double> xk, std::span<const int> outcome,
                              const LogisticOptions& options = {});

/// Outcome 1 for class 2, 0 for class 1.
std::vector<int> binary_outcome(const ClassLabels& y);

/**
 * @brief Benjamini-Hochberg step-up adjustment.
 *
 * Vectors are in ascending p-value order; `order[i]` is the input position of
 * the i-th smallest p-value (ties keep input order).
 */
struct BhResult {
    std::vector<std::size_t> order;
    std::vector<double> sorted_p;
    /// min over i' >= i of p(i') m / i', capped at 1.
    std::vector<double> adjusted;
    /// p(i) m / i, the plug-in FDR estimate at rank i (not monotonized).
    std::vector<double> fdr_estimate;

    std::vector<double> adjusted_in_input_order() const;
};

/// Throws `DomainError` for p-values outside [0, 1].
BhResult bh_fdr(std::span<const double> pvalues);

struct BaselineRow {
    std::size_t j = 0;
    std::size_t k = 0;
    LogisticFit fit;
};

struct BaselineResult {
    std::vector<BaselineRow> rows;
    BhResult bh;
};

/// Fits every pair on the raw (unstandardized) features, then applies BH.
BaselineResult run_baseline(const DataMatrix& x, const ClassLabels& y, const PairSet& pairs,
                            const LogisticOptions& options = {});

/// TSV: feature_j, feature_k, gamma_hat, se, p_value, bh_adjusted, flags.
void write_baseline_report(std::ostream& out, const BaselineResult& result, const std::vector<std::string>& names,
                           const std::vector<std::pair<std::string, std::string>>& header = {});

} // namespace tmicor

#endif
