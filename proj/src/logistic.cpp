#include "tmicor/logistic.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/table_io.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace tmicor {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct Design {
    std::vector<std::array<double, 4>> rows;
    double mean_j = 0, sd_j = 1, mean_k = 0, sd_k = 1;
};

double column_sd(std::span<const double> x, double mean) {
    double ss = 0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(x.size()));
}

Design make_design(std::span<const double> xj, std::span<const double> xk) {
    Design d;
    const double n = static_cast<double>(xj.size());
    d.mean_j = std::accumulate(xj.begin(), xj.end(), 0.0) / n;
    d.mean_k = std::accumulate(xk.begin(), xk.end(), 0.0) / n;
    d.sd_j = column_sd(xj, d.mean_j);
    d.sd_k = column_sd(xk, d.mean_k);
    if (!(d.sd_j > 0) || !(d.sd_k > 0)) {
        throw DegenerateFeature("constant predictor in logistic fit", {});
    }
    d.rows.resize(xj.size());
    for (std::size_t i = 0; i < xj.size(); ++i) {
        const double zj = (xj[i] - d.mean_j) / d.sd_j;
        const double zk = (xk[i] - d.mean_k) / d.sd_k;
        d.rows[i] = {1.0, zj, zk, zj * zk};
    }
    return d;
}

struct Evaluation {
    double loglik = 0;
    double max_abs_eta = 0;
    Vec4 score = Vec4::Zero();
    Mat4 information = Mat4::Zero();
};

// log(1 + e^eta) without overflow.
double softplus(double eta) {
    return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

Evaluation evaluate(const Design& d, std::span<const int> y, const Vec4& beta, bool with_derivatives) {
    Evaluation e;
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    double h00 = 0, h01 = 0, h02 = 0, h03 = 0, h11 = 0, h12 = 0, h13 = 0, h22 = 0, h23 = 0, h33 = 0;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const auto& x = d.rows[i];
        const double eta = beta[0] + beta[1] * x[1] + beta[2] * x[2] + beta[3] * x[3];
        e.max_abs_eta = std::max(e.max_abs_eta, std::abs(eta));
        e.loglik += y[i] * eta - softplus(eta);
        if (!with_derivatives) {
            continue;
        }
        const double prob = 1.0 / (1.0 + std::exp(-eta));
        const double r = y[i] - prob;
        const double w = prob * (1.0 - prob);
        s0 += r;
        s1 += r * x[1];
        s2 += r * x[2];
        s3 += r * x[3];
        h00 += w;
        h01 += w * x[1];
        h02 += w * x[2];
        h03 += w * x[3];
        h11 += w * x[1] * x[1];
        h12 += w * x[1] * x[2];
        h13 += w * x[1] * x[3];
        h22 += w * x[2] * x[2];
        h23 += w * x[2] * x[3];
        h33 += w * x[3] * x[3];
    }
    if (with_derivatives) {
        e.score << s0, s1, s2, s3;
        e.information << h00, h01, h02, h03, h01, h11, h12, h13, h02, h12, h22, h23, h03, h13, h23, h33;
    }
    return e;
}

} // namespace

std::vector<int> binary_outcome(const ClassLabels& y) {
    std::vector<int> out;
    out.reserve(y.n());
    for (int v : y.labels()) {
        out.push_back(v == 2 ? 1 : 0);
    }
    return out;
}

LogisticFit fit_pair_logistic(std::span<const double> xj, std::span<const double> xk, std::span<const int> outcome,
                              const LogisticOptions& options) {
    if (xj.size() != xk.size() || xj.size() != outcome.size()) {
        throw ShapeError("logistic fit inputs differ in length");
    }
    for (int v : outcome) {
        if (v != 0 && v != 1) {
            throw LabelError("logistic outcome must be 0 or 1");
        }
    }
    const Design d = make_design(xj, xk);

    LogisticFit fit;
    Vec4 beta = Vec4::Zero();
    Evaluation cur = evaluate(d, outcome, beta, true);
    bool polished = false;
    for (unsigned iter = 1; iter <= options.max_iterations; ++iter) {
        fit.iterations = iter;
        Eigen::LDLT<Mat4> solver(cur.information);
        if (solver.info() != Eigen::Success || !solver.isPositive()) {
            fit.separated = true;
            break;
        }
        Vec4 step = solver.solve(cur.score);
        Vec4 next = beta + step;
        Evaluation trial = evaluate(d, outcome, next, false);
        const double slack = 1e-12 * (std::abs(cur.loglik) + 1.0);
        for (int halvings = 0; trial.loglik < cur.loglik - slack && halvings < 30; ++halvings) {
            step *= 0.5;
            next = beta + step;
            trial = evaluate(d, outcome, next, false);
        }
        const double previous = cur.loglik;
        beta = next;
        cur = evaluate(d, outcome, beta, true);
        if (cur.max_abs_eta > options.separation_eta || !beta.allFinite()) {
            fit.separated = true;
            break;
        }
        const double grad = cur.score.lpNorm<Eigen::Infinity>();
        const double rel = std::abs(cur.loglik - previous) / (std::abs(previous) + 1e-300);
        if (polished && grad <= options.gradient_tol) {
            fit.converged = true;
            break;
        }
        polished = grad <= options.gradient_tol || rel < options.loglik_rel_tol;
    }

    fit.log_likelihood = cur.loglik;
    fit.max_score = cur.score.lpNorm<Eigen::Infinity>();

    // Back to the original scale: zj = (xj - mj)/sj, zk = (xk - mk)/sk.
    const double sjk = d.sd_j * d.sd_k;
    fit.gamma_jk = beta[3] / sjk;
    fit.beta_j = beta[1] / d.sd_j - beta[3] * d.mean_k / sjk;
    fit.beta_k = beta[2] / d.sd_k - beta[3] * d.mean_j / sjk;
    fit.beta0 = beta[0] - beta[1] * d.mean_j / d.sd_j - beta[2] * d.mean_k / d.sd_k + beta[3] * d.mean_j * d.mean_k / sjk;

    if (fit.separated) {
        fit.p_value = 1.0;
        fit.se_gamma = std::numeric_limits<double>::infinity();
        return fit;
    }
    const Mat4 cov = cur.information.inverse();
    const double se_internal = std::sqrt(std::max(cov(3, 3), 0.0));
    fit.se_gamma = se_internal / sjk;
    const double z = se_internal > 0 ? beta[3] / se_internal : 0.0;
    fit.p_value = std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0);
    return fit;
}

std::vector<double> BhResult::adjusted_in_input_order() const {
    std::vector<double> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        out[order[i]] = adjusted[i];
    }
    return out;
}

BhResult bh_fdr(std::span<const double> pvalues) {
    for (double p : pvalues) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("p-value outside [0, 1]");
        }
    }
    const std::size_t m = pvalues.size();
    BhResult out;
    out.order.resize(m);
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
    out.sorted_p.resize(m);
    out.fdr_estimate.resize(m);
    out.adjusted.resize(m);
    const double total = static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.sorted_p[i] = pvalues[out.order[i]];
        out.fdr_estimate[i] = out.sorted_p[i] * total / static_cast<double>(i + 1);
    }
    double running = 1.0;
    for (std::size_t i = m; i-- > 0;) {
        running = std::min(running, out.fdr_estimate[i]);
        out.adjusted[i] = running;
    }
    return out;
}

BaselineResult run_baseline(const DataMatrix& x, const ClassLabels& y, const PairSet& pairs,
                            const LogisticOptions& options) {
    if (x.n() != y.n()) {
        throw ShapeError("data and labels disagree on sample count");
    }
    const auto outcome = binary_outcome(y);
    std::vector<std::vector<double>> columns(x.p());
    for (std::size_t j = 0; j < x.p(); ++j) {
        const auto col = x.values().col(static_cast<Eigen::Index>(j));
        columns[j].assign(col.data(), col.data() + col.size());
    }
    BaselineResult result;
    result.rows.resize(pairs.size());
    const auto total = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t o = 0; o < total; ++o) {
        const auto [j, k] = pairs.at(static_cast<std::size_t>(o));
        auto& row = result.rows[static_cast<std::size_t>(o)];
        row.j = j;
        row.k = k;
        row.fit = fit_pair_logistic(columns[j], columns[k], outcome, options);
    }
    std::vector<double> pvals(result.rows.size());
    for (std::size_t i = 0; i < pvals.size(); ++i) {
        pvals[i] = result.rows[i].fit.p_value;
    }
    result.bh = bh_fdr(pvals);
    return result;
}

void write_baseline_report(std::ostream& out, const BaselineResult& result, const std::vector<std::string>& names,
                           const std::vector<std::pair<std::string, std::string>>& header) {
    write_comment_header(out, header);
    out << "feature_j\tfeature_k\tgamma_hat\tse\tp_value\tbh_adjusted\tflags\n";
    const auto adjusted = result.bh.adjusted_in_input_order();
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        std::string flags;
        if (r.fit.separated) {
            flags = "separated";
        } else if (!r.fit.converged) {
            flags = "not_converged";
        } else {
            flags = "ok";
        }
        out << names[r.j] << '\t' << names[r.k] << '\t' << format_double(r.fit.gamma_jk) << '\t'
            << format_double(r.fit.se_gamma) << '\t' << format_double(r.fit.p_value) << '\t'
            << format_double(adjusted[i]) << '\t' << flags << '\n';
    }
}

} // namespace tmicor
