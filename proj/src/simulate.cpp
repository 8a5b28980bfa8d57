#include "tmicor/simulate.hpp"
#include "tmicor/correlation.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/logistic.hpp"
#include "tmicor/table_io.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace tmicor {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::size_t to_size(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        throw ValidationError("config key '" + key + "' expects a non-negative integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v)) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::logic_error&) {
        throw ValidationError("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ValidationError("config key '" + key + "' expects true/false, got '" + value + "'");
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += format_double(values[i]);
    }
    return out;
}

} // namespace

void SimulationConfig::validate() const {
    if (blocks < 1 || block_size < 2) {
        throw ValidationError("need at least 1 block of at least 2 features");
    }
    if (rho.size() != 1 && rho.size() != blocks) {
        throw ValidationError("rho needs 1 or " + std::to_string(blocks) + " values, got " + std::to_string(rho.size()));
    }
    if (n_per_class < ClassLabels::default_min_class_size) {
        throw ValidationError("n_per_class must be at least 4");
    }
    if (trials < 1) {
        throw ValidationError("trials must be at least 1");
    }
    if (permutations < 1 && null_method == NullMethod::permutation) {
        throw ValidationError("permutations must be at least 1");
    }
    const double lower = -1.0 / static_cast<double>(block_size - 1);
    auto check = [&](double r, const std::string& what) {
        if (!(r > lower && r < 1.0)) {
            throw NotPositiveDefinite(what + " = " + format_double(r) + " is outside (" + format_double(lower) +
                                      ", 1); the equicorrelated block is not positive definite");
        }
    };
    for (std::size_t b = 0; b < blocks; ++b) {
        check(rho_of(b), "rho[" + std::to_string(b) + "]");
    }
    check(rho1_tilde, "rho1_tilde");
}

SimulationConfig parse_simulation_config(std::istream& in) {
    SimulationConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "blocks") {
            cfg.blocks = to_size(key, value);
        } else if (key == "block_size") {
            cfg.block_size = to_size(key, value);
        } else if (key == "rho") {
            cfg.rho.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                cfg.rho.push_back(to_double(key, trim(item)));
            }
        } else if (key == "rho1_tilde") {
            cfg.rho1_tilde = to_double(key, value);
        } else if (key == "mean_shift") {
            cfg.mean_shift = to_double(key, value);
        } else if (key == "n_per_class") {
            cfg.n_per_class = to_size(key, value);
        } else if (key == "trials") {
            cfg.trials = to_size(key, value);
        } else if (key == "permutations") {
            cfg.permutations = to_size(key, value);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_size(key, value));
        } else if (key == "max_rank") {
            cfg.max_rank = to_size(key, value);
        } else if (key == "mode") {
            if (value == "restandardize") {
                cfg.mode = PermutationMode::restandardize;
            } else if (value == "raw") {
                cfg.mode = PermutationMode::raw;
            } else {
                throw ValidationError("mode must be restandardize or raw, got '" + value + "'");
            }
        } else if (key == "null") {
            if (value == "permutation") {
                cfg.null_method = NullMethod::permutation;
            } else if (value == "theoretical") {
                cfg.null_method = NullMethod::theoretical;
            } else {
                throw ValidationError("null must be permutation or theoretical, got '" + value + "'");
            }
        } else if (key == "run_logistic") {
            cfg.run_logistic = to_bool(key, value);
        } else {
            throw ValidationError("unknown config key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

SimulationConfig read_simulation_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    return parse_simulation_config(in);
}

std::vector<std::pair<std::string, std::string>> describe(const SimulationConfig& cfg) {
    return {
        {"blocks", std::to_string(cfg.blocks)},
        {"block_size", std::to_string(cfg.block_size)},
        {"rho", join_doubles(cfg.rho)},
        {"rho1_tilde", format_double(cfg.rho1_tilde)},
        {"mean_shift", format_double(cfg.mean_shift)},
        {"n_per_class", std::to_string(cfg.n_per_class)},
        {"trials", std::to_string(cfg.trials)},
        {"permutations", std::to_string(cfg.permutations)},
        {"seed", std::to_string(cfg.seed)},
        {"max_rank", std::to_string(cfg.max_rank)},
        {"mode", cfg.mode == PermutationMode::raw ? "raw" : "restandardize"},
        {"null", cfg.null_method == NullMethod::theoretical ? "theoretical" : "permutation"},
        {"run_logistic", cfg.run_logistic ? "true" : "false"},
    };
}

CovariancePair build_covariances(const SimulationConfig& cfg) {
    cfg.validate();
    const auto p = static_cast<Eigen::Index>(cfg.p());
    const auto b = static_cast<Eigen::Index>(cfg.block_size);
    CovariancePair out{Matrix::Zero(p, p), Matrix::Zero(p, p)};
    for (std::size_t blk = 0; blk < cfg.blocks; ++blk) {
        const auto start = static_cast<Eigen::Index>(blk) * b;
        const double r1 = cfg.rho_of(blk);
        const double r2 = blk == 0 ? cfg.rho1_tilde : r1;
        out.sigma1.block(start, start, b, b).setConstant(r1);
        out.sigma2.block(start, start, b, b).setConstant(r2);
    }
    out.sigma1.diagonal().setOnes();
    out.sigma2.diagonal().setOnes();
    return out;
}

DataMatrix sample_class(const Matrix& sigma, const Vector& mu, std::size_t n, Rng& rng) {
    const auto p = sigma.rows();
    if (sigma.cols() != p || mu.size() != p) {
        throw ShapeError("covariance and mean dimensions disagree");
    }
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw CholeskyFailure("covariance is not positive definite");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(static_cast<Eigen::Index>(n), p);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            z(i, j) = normal(rng);
        }
    }
    Matrix x = z * llt.matrixL().transpose();
    x.rowwise() += mu.transpose();
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        names.push_back("f" + std::to_string(j + 1));
    }
    return DataMatrix(std::move(x), std::move(names));
}

bool is_alternative(const SimulationConfig& cfg, std::size_t j, std::size_t k) {
    return cfg.rho1_tilde != cfg.rho_of(0) && j < cfg.block_size && k < cfg.block_size && j != k;
}

SimulatedData simulate_trial_data(const SimulationConfig& cfg, std::uint64_t trial_seed) {
    const auto cov = build_covariances(cfg);
    const auto p = static_cast<Eigen::Index>(cfg.p());
    Vector mu1 = Vector::Zero(p);
    Vector mu2 = Vector::Zero(p);
    mu2.head(static_cast<Eigen::Index>(cfg.block_size)).setConstant(cfg.mean_shift);

    auto rng1 = substream(trial_seed, 1);
    auto rng2 = substream(trial_seed, 2);
    const DataMatrix x1 = sample_class(cov.sigma1, mu1, cfg.n_per_class, rng1);
    const DataMatrix x2 = sample_class(cov.sigma2, mu2, cfg.n_per_class, rng2);

    Matrix stacked(x1.values().rows() + x2.values().rows(), p);
    stacked << x1.values(), x2.values();
    std::vector<int> labels(cfg.n_per_class, 1);
    labels.resize(2 * cfg.n_per_class, 2);
    return {DataMatrix(std::move(stacked), x1.feature_names()), ClassLabels(std::move(labels))};
}

std::vector<double> true_fdr_curve(const std::vector<bool>& ranked_is_alternative) {
    std::vector<double> out(ranked_is_alternative.size());
    std::size_t false_rejections = 0;
    for (std::size_t l = 0; l < ranked_is_alternative.size(); ++l) {
        false_rejections += ranked_is_alternative[l] ? 0 : 1;
        out[l] = static_cast<double>(false_rejections) / static_cast<double>(l + 1);
    }
    return out;
}

TrialResult run_trial(const SimulationConfig& cfg, std::size_t trial) {
    const std::uint64_t trial_seed = substream_seed(cfg.seed, trial);
    const auto data = simulate_trial_data(cfg, trial_seed);
    const auto pairs = PairSet::all_pairs(cfg.p());
    const std::size_t ranks = cfg.max_rank == 0 ? pairs.size() : std::min(cfg.max_rank, pairs.size());

    TrialResult out;
    const auto xstd = standardize_within_class(data.x, data.y);
    const auto stats = pair_statistics(class_correlations(xstd, data.y), pairs);
    out.saturated = stats.saturated;

    FdrCurve curve;
    if (cfg.null_method == NullMethod::permutation) {
        PermutationPlan plan;
        plan.permutations = cfg.permutations;
        plan.seed = substream_seed(trial_seed, 3);
        plan.mode = cfg.mode;
        const auto pool = generate_null_pool(xstd, data.y, pairs, plan);
        out.saturated += pool.saturated;
        out.redraws = pool.redraws;
        curve = estimate_fdr(stats.stats, pool, ranks);
    } else {
        curve = theoretical_fdr(stats.stats, data.y.n1(), data.y.n2(), ranks);
    }

    auto record = [&](const std::vector<bool>& alt, std::vector<double>& true_fdr, std::vector<std::size_t>& found) {
        true_fdr = true_fdr_curve(alt);
        found.resize(alt.size());
        std::size_t count = 0;
        for (std::size_t l = 0; l < alt.size(); ++l) {
            count += alt[l] ? 1 : 0;
            found[l] = count;
        }
    };

    std::vector<bool> alt(ranks);
    for (std::size_t l = 0; l < ranks; ++l) {
        const auto& s = stats.stats[curve.pair_index[l]];
        alt[l] = is_alternative(cfg, s.j, s.k);
    }
    out.fdr_est_tmicor = curve.fdr_hat;
    record(alt, out.fdr_true_tmicor, out.alt_found_tmicor);

    if (cfg.run_logistic) {
        const auto baseline = run_baseline(data.x, data.y, pairs);
        out.fdr_est_logistic.resize(ranks);
        for (std::size_t l = 0; l < ranks; ++l) {
            const auto& row = baseline.rows[baseline.bh.order[l]];
            alt[l] = is_alternative(cfg, row.j, row.k);
            out.fdr_est_logistic[l] = std::min(baseline.bh.fdr_estimate[l], 1.0);
        }
        record(alt, out.fdr_true_logistic, out.alt_found_logistic);
    }
    return out;
}

CurveSummary summarize(const std::vector<std::vector<double>>& curves) {
    CurveSummary out;
    if (curves.empty() || curves.front().empty()) {
        return out;
    }
    const std::size_t len = curves.front().size();
    const double count = static_cast<double>(curves.size());
    out.mean.assign(len, 0.0);
    out.se.assign(len, 0.0);
    for (std::size_t l = 0; l < len; ++l) {
        double sum = 0;
        for (const auto& c : curves) {
            sum += c[l];
        }
        const double mean = sum / count;
        double ss = 0;
        for (const auto& c : curves) {
            ss += (c[l] - mean) * (c[l] - mean);
        }
        out.mean[l] = mean;
        out.se[l] = curves.size() > 1 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
    }
    return out;
}

ExperimentResult run_experiment(const SimulationConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.trials.resize(cfg.trials);
    std::exception_ptr failure;
    const auto total = static_cast<std::ptrdiff_t>(cfg.trials);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < total; ++t) {
        try {
            result.trials[static_cast<std::size_t>(t)] = run_trial(cfg, static_cast<std::size_t>(t));
        } catch (...) {
#pragma omp critical(tmicor_experiment_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    auto collect = [&](auto member) {
        std::vector<std::vector<double>> curves;
        for (const auto& t : result.trials) {
            curves.push_back(t.*member);
        }
        return summarize(curves);
    };
    result.est_tmicor = collect(&TrialResult::fdr_est_tmicor);
    result.true_tmicor = collect(&TrialResult::fdr_true_tmicor);
    result.est_logistic = collect(&TrialResult::fdr_est_logistic);
    result.true_logistic = collect(&TrialResult::fdr_true_logistic);
    return result;
}

namespace {

void write_curves(std::ostream& out, const ExperimentResult& result, char delim) {
    const char* cols[] = {"rank",          "fdr_est_tmicor", "fdr_true_tmicor", "fdr_est_logistic",
                          "fdr_true_logistic", "se_est_tmicor", "se_true_tmicor", "se_est_logistic",
                          "se_true_logistic"};
    for (std::size_t c = 0; c < std::size(cols); ++c) {
        out << (c ? std::string(1, delim) : std::string()) << cols[c];
    }
    out << '\n';
    auto at = [](const std::vector<double>& v, std::size_t l) {
        return l < v.size() ? format_double(v[l]) : std::string("NA");
    };
    for (std::size_t l = 0; l < result.ranks(); ++l) {
        out << l + 1 << delim << at(result.est_tmicor.mean, l) << delim << at(result.true_tmicor.mean, l) << delim
            << at(result.est_logistic.mean, l) << delim << at(result.true_logistic.mean, l) << delim
            << at(result.est_tmicor.se, l) << delim << at(result.true_tmicor.se, l) << delim
            << at(result.est_logistic.se, l) << delim << at(result.true_logistic.se, l) << '\n';
    }
}

} // namespace

void write_experiment_tsv(std::ostream& out, const ExperimentResult& result,
                          const std::vector<std::pair<std::string, std::string>>& header) {
    write_comment_header(out, header);
    write_curves(out, result, '\t');
}

void write_plot_csv(std::ostream& out, const ExperimentResult& result) {
    write_curves(out, result, ',');
}

std::vector<ProbeRow> consistency_probe(const std::vector<std::size_t>& p_schedule,
                                        const std::vector<std::size_t>& n_schedule, const SimulationConfig& base,
                                        std::size_t replicates, std::uint64_t seed) {
    if (p_schedule.empty() || n_schedule.empty()) {
        throw ValidationError("probe schedules must be non-empty");
    }
    if (!std::is_sorted(n_schedule.begin(), n_schedule.end())) {
        throw ValidationError("n schedule must be increasing");
    }
    std::vector<ProbeRow> rows;
    std::uint64_t cell = 0;
    for (auto p : p_schedule) {
        if (p % base.block_size != 0) {
            throw ValidationError("p = " + std::to_string(p) + " is not a multiple of block_size");
        }
        for (auto n : n_schedule) {
            SimulationConfig cfg = base;
            cfg.blocks = p / base.block_size;
            if (cfg.rho.size() != 1) {
                cfg.rho.resize(cfg.blocks, cfg.rho.back());
            }
            cfg.n_per_class = n;
            cfg.validate();
            const auto pairs = PairSet::all_pairs(p);
            for (std::size_t rep = 0; rep < replicates; ++rep, ++cell) {
                const std::uint64_t rep_seed = substream_seed(seed, cell);
                const auto data = simulate_trial_data(cfg, rep_seed);
                const auto xstd = standardize_within_class(data.x, data.y);
                const auto stats = pair_statistics(class_correlations(xstd, data.y), pairs);

                ProbeRow row;
                row.n = n;
                row.p = p;
                row.replicate = rep;
                row.rate = std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
                row.min_alt_abs_t = std::numeric_limits<double>::infinity();
                bool any_alt = false;
                for (const auto& s : stats.stats) {
                    const double v = std::abs(s.t_value);
                    if (is_alternative(cfg, s.j, s.k)) {
                        any_alt = true;
                        row.min_alt_abs_t = std::min(row.min_alt_abs_t, v);
                    } else {
                        row.max_null_abs_t = std::max(row.max_null_abs_t, v);
                    }
                }
                if (!any_alt) {
                    row.min_alt_abs_t = std::numeric_limits<double>::quiet_NaN();
                }
                if (base.permutations > 0) {
                    PermutationPlan plan;
                    plan.permutations = base.permutations;
                    plan.seed = substream_seed(rep_seed, 3);
                    plan.mode = base.mode;
                    const auto pool = generate_null_pool(xstd, data.y, pairs, plan);
                    row.max_perm_abs_t = pool.sorted.back();
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_probe_tsv(std::ostream& out, const std::vector<ProbeRow>& rows) {
    out << "n\tp\treplicate\tmax_null_abs_t\tmin_alt_abs_t\tmax_perm_abs_t\trate\tnull_over_rate\tperm_over_rate\n";
    for (const auto& r : rows) {
        out << r.n << '\t' << r.p << '\t' << r.replicate << '\t' << format_double(r.max_null_abs_t) << '\t'
            << format_double(r.min_alt_abs_t) << '\t' << format_double(r.max_perm_abs_t) << '\t'
            << format_double(r.rate) << '\t' << format_double(r.max_null_abs_t / r.rate) << '\t'
            << format_double(r.max_perm_abs_t / r.rate) << '\n';
    }
}

} // namespace tmicor
