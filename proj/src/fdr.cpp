#include "tmicor/fdr.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/table_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>

namespace tmicor {

namespace {

FdrCurve ranked_curve(const std::vector<PairStatistic>& stats, std::size_t max_rank) {
    if (max_rank > stats.size()) {
        throw ValidationError("max rank " + std::to_string(max_rank) + " exceeds the " + std::to_string(stats.size()) +
                              " tested pairs");
    }
    FdrCurve curve;
    auto order = rank_by_abs_t(stats);
    order.resize(max_rank);
    curve.pair_index = std::move(order);
    curve.ranks.resize(max_rank);
    curve.thresholds.resize(max_rank);
    for (std::size_t l = 0; l < max_rank; ++l) {
        curve.ranks[l] = l + 1;
        curve.thresholds[l] = std::abs(stats[curve.pair_index[l]].t_value);
    }
    curve.numerator.resize(max_rank);
    curve.fdr_hat_raw.resize(max_rank);
    curve.fdr_hat.resize(max_rank);
    return curve;
}

void finish(FdrCurve& curve) {
    for (std::size_t l = 0; l < curve.size(); ++l) {
        curve.fdr_hat_raw[l] = curve.numerator[l] / static_cast<double>(curve.ranks[l]);
        curve.fdr_hat[l] = std::clamp(curve.fdr_hat_raw[l], 0.0, 1.0);
    }
}

} // namespace

std::vector<std::size_t> rank_by_abs_t(const std::vector<PairStatistic>& stats) {
    std::vector<std::size_t> order(stats.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ta = std::abs(stats[a].t_value);
        const double tb = std::abs(stats[b].t_value);
        if (ta != tb) {
            return ta > tb;
        }
        return std::tie(stats[a].j, stats[a].k) < std::tie(stats[b].j, stats[b].k);
    });
    return order;
}

FdrCurve estimate_fdr(const std::vector<PairStatistic>& stats, const NullPool& pool, std::size_t max_rank) {
    if (pool.sorted.empty() || pool.permutations == 0) {
        throw EmptyPool("null pool is empty");
    }
    FdrCurve curve = ranked_curve(stats, max_rank);
    curve.method = NullMethod::permutation;
    const double a = static_cast<double>(pool.permutations);
    // Thresholds are non-increasing in rank, so the first pool index above the
    // threshold only moves left.
    std::size_t cut = pool.sorted.size();
    for (std::size_t l = 0; l < curve.size(); ++l) {
        const double t = curve.thresholds[l];
        while (cut > 0 && pool.sorted[cut - 1] > t) {
            --cut;
        }
        curve.numerator[l] = static_cast<double>(pool.sorted.size() - cut) / a;
    }
    finish(curve);
    return curve;
}

double null_sd(std::size_t n1, std::size_t n2) {
    if (n1 <= 3 || n2 <= 3) {
        throw DomainError("class sizes must exceed 3");
    }
    return std::sqrt(1.0 / static_cast<double>(n1 - 3) + 1.0 / static_cast<double>(n2 - 3));
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

FdrCurve theoretical_fdr(const std::vector<PairStatistic>& stats, std::size_t n1, std::size_t n2,
                         std::size_t max_rank) {
    const double s = null_sd(n1, n2);
    FdrCurve curve = ranked_curve(stats, max_rank);
    curve.method = NullMethod::theoretical;
    const double pairs = static_cast<double>(stats.size());
    for (std::size_t l = 0; l < curve.size(); ++l) {
        // 2 Phi(-|t|/s) = erfc(|t| / (s sqrt 2))
        curve.numerator[l] = pairs * std::erfc(curve.thresholds[l] / (s * std::sqrt(2.0)));
    }
    finish(curve);
    return curve;
}

void make_monotone(FdrCurve& curve) {
    for (std::size_t l = 1; l < curve.size(); ++l) {
        curve.fdr_hat_raw[l] = std::max(curve.fdr_hat_raw[l], curve.fdr_hat_raw[l - 1]);
        curve.fdr_hat[l] = std::max(curve.fdr_hat[l], curve.fdr_hat[l - 1]);
    }
    curve.monotone = true;
}

void write_fdr_report(std::ostream& out, const FdrCurve& curve, const std::vector<PairStatistic>& stats,
                      const std::vector<std::string>& names,
                      const std::vector<std::pair<std::string, std::string>>& header) {
    write_comment_header(out, header);
    out << "rank\tfeature_j\tfeature_k\tt\tfdr_hat_raw\tfdr_hat\n";
    for (std::size_t l = 0; l < curve.size(); ++l) {
        const auto& s = stats[curve.pair_index[l]];
        out << curve.ranks[l] << '\t' << names[s.j] << '\t' << names[s.k] << '\t' << format_double(s.t_value) << '\t'
            << format_double(curve.fdr_hat_raw[l]) << '\t' << format_double(curve.fdr_hat[l]) << '\n';
    }
}

std::vector<FdrReportRow> read_fdr_report(std::istream& in) {
    std::vector<FdrReportRow> rows;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto cells = split_line(line, '\t');
        if (!header_seen) {
            if (cells.size() != 6 || cells[0] != "rank") {
                throw ParseError("FDR report header expected at line " + std::to_string(line_no));
            }
            header_seen = true;
            continue;
        }
        if (cells.size() != 6) {
            throw ShapeError("FDR report line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                             " cells");
        }
        FdrReportRow row;
        try {
            row.rank = static_cast<std::size_t>(std::stoull(cells[0]));
            row.feature_j = cells[1];
            row.feature_k = cells[2];
            row.t = std::stod(cells[3]);
            row.fdr_hat_raw = std::stod(cells[4]);
            row.fdr_hat = std::stod(cells[5]);
        } catch (const std::logic_error&) {
            throw ParseError("malformed FDR report line " + std::to_string(line_no));
        }
        rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw ParseError("empty FDR report");
    }
    return rows;
}

} // namespace tmicor
