#ifndef TMICOR_SIMULATE_HPP
#define TMICOR_SIMULATE_HPP

#include "tmicor/data.hpp"
#include "tmicor/fdr.hpp"
#include "tmicor/null_pool.hpp"
#include "tmicor/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

/**
 * @file simulate.hpp
 * @brief Two-class block-equicorrelated Gaussian experiments with known truth.
 *
 * Class 1 has block-diagonal correlation with constant off-diagonal rho[b] in
 * block b. Class 2 is identical except block 0 uses rho1_tilde, and the
 * features of block 0 may be mean-shifted. The alternative pairs are exactly
 * the within-block-0 pairs when rho1_tilde != rho[0].
 */

namespace tmicor {

struct SimulationConfig {
    std::size_t blocks = 10;
    std::size_t block_size = 10;
    /// One value per block, or a single value used for every block.
    std::vector<double> rho{0.3};
    double rho1_tilde = 0.0;
    double mean_shift = 0.0;
    std::size_t n_per_class = 250;
    std::size_t trials = 10;
    std::size_t permutations = 100;
    std::uint64_t seed = 1;
    /// Ranks reported per curve; 0 means every pair.
    std::size_t max_rank = 200;
    PermutationMode mode = PermutationMode::restandardize;
    NullMethod null_method = NullMethod::permutation;
    bool run_logistic = true;

    std::size_t p() const { return blocks * block_size; }
    double rho_of(std::size_t block) const { return rho.size() == 1 ? rho.front() : rho.at(block); }
    /// Throws `ValidationError` / `NotPositiveDefinite` on a bad config.
    void validate() const;
};

SimulationConfig parse_simulation_config(std::istream& in);
SimulationConfig read_simulation_config(const std::string& path);
std::vector<std::pair<std::string, std::string>> describe(const SimulationConfig& cfg);

struct CovariancePair {
    Matrix sigma1;
    Matrix sigma2;
};

CovariancePair build_covariances(const SimulationConfig& cfg);

/// `n` draws of N(mu, sigma) through the lower Cholesky factor. Throws `CholeskyFailure`.
DataMatrix sample_class(const Matrix& sigma, const Vector& mu, std::size_t n, Rng& rng);

/// Whether pair (j, k) differs in correlation between the classes.
bool is_alternative(const SimulationConfig& cfg, std::size_t j, std::size_t k);

/// Both classes of one trial, stacked class 1 then class 2.
struct SimulatedData {
    DataMatrix x;
    ClassLabels y;
};

SimulatedData simulate_trial_data(const SimulationConfig& cfg, std::uint64_t trial_seed);

/// Per-rank curves of one trial; index l is rank l + 1.
struct TrialResult {
    std::vector<double> fdr_est_tmicor;
    std::vector<double> fdr_true_tmicor;
    std::vector<double> fdr_est_logistic;
    std::vector<double> fdr_true_logistic;
    std::vector<std::size_t> alt_found_tmicor;
    std::vector<std::size_t> alt_found_logistic;
    std::size_t saturated = 0;
    std::size_t redraws = 0;
};

/// Realized false discovery proportion at each rank; 0 where nothing is rejected.
std::vector<double> true_fdr_curve(const std::vector<bool>& ranked_is_alternative);

TrialResult run_trial(const SimulationConfig& cfg, std::size_t trial);

struct CurveSummary {
    std::vector<double> mean;
    std::vector<double> se;
};

struct ExperimentResult {
    std::vector<TrialResult> trials;
    CurveSummary est_tmicor, true_tmicor, est_logistic, true_logistic;
    std::size_t ranks() const { return est_tmicor.mean.size(); }
};

/// Runs every trial (trial t seeded by substream_seed(cfg.seed, t)) and
/// aggregates mean +/- standard error of the mean per rank. Any failed trial
/// aborts the experiment.
ExperimentResult run_experiment(const SimulationConfig& cfg);

CurveSummary summarize(const std::vector<std::vector<double>>& curves);

/// TSV: rank, the four mean curves, then their standard errors.
void write_experiment_tsv(std::ostream& out, const ExperimentResult& result,
                          const std::vector<std::pair<std::string, std::string>>& header = {});
/// Same columns, comma-separated and without the comment header.
void write_plot_csv(std::ostream& out, const ExperimentResult& result);

struct ProbeRow {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t replicate = 0;
    double max_null_abs_t = 0;
    /// NaN when there are no alternative pairs.
    double min_alt_abs_t = 0;
    double max_perm_abs_t = 0;
    /// sqrt(log p / n)
    double rate = 0;
};

/**
 * Empirical convergence probe. For every (n, p, replicate) it simulates data
 * from `base` with n samples per class and p / base.block_size blocks, and
 * records the largest null |T|, the smallest alternative |T|, and the largest
 * |T*| over `base.permutations` relabelings in `base.mode`.
 */
std::vector<ProbeRow> consistency_probe(const std::vector<std::size_t>& p_schedule,
                                        const std::vector<std::size_t>& n_schedule, const SimulationConfig& base,
                                        std::size_t replicates, std::uint64_t seed);

void write_probe_tsv(std::ostream& out, const std::vector<ProbeRow>& rows);

} // namespace tmicor

#endif
