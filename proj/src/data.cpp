#include "tmicor/data.hpp"
#include "tmicor/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

namespace tmicor {

namespace {

// Standard deviations at or below this fraction of the column's magnitude are
// treated as zero; constant columns rarely come out as exactly 0 after the
// mean is rounded.
constexpr double degenerate_rel_tol = 1e-12;

struct ColumnMoments {
    double mean = 0;
    double sd = 0;
    double max_abs = 0;
};

ColumnMoments class_column_moments(const Matrix& values, const std::vector<std::size_t>& rows, Eigen::Index col) {
    ColumnMoments out;
    const double count = static_cast<double>(rows.size());
    double sum = 0;
    for (auto r : rows) {
        const double v = values(static_cast<Eigen::Index>(r), col);
        sum += v;
        out.max_abs = std::max(out.max_abs, std::abs(v));
    }
    out.mean = sum / count;
    double ss = 0;
    for (auto r : rows) {
        const double d = values(static_cast<Eigen::Index>(r), col) - out.mean;
        ss += d * d;
    }
    out.sd = std::sqrt(ss / count);
    return out;
}

bool is_degenerate(const ColumnMoments& m) {
    return m.sd == 0 || m.sd <= degenerate_rel_tol * m.max_abs;
}

std::string join_names(const std::vector<std::string>& names) {
    std::ostringstream out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) {
            out << ", ";
        }
        out << names[i];
    }
    return out.str();
}

void check_same_n(const DataMatrix& x, const ClassLabels& y) {
    if (x.n() != y.n()) {
        throw ShapeError("data has " + std::to_string(x.n()) + " samples but labels have " + std::to_string(y.n()));
    }
}

// Standardizes `values` in place class by class; `names` is only used for errors.
StandardizedMatrix standardize_values(Matrix values, const ClassLabels& y, const std::vector<std::string>& names,
                                      const std::vector<double>* scale_reference = nullptr) {
    const auto p = values.cols();
    StandardizedMatrix out;
    out.class_means.resize(2, p);
    out.class_sds.resize(2, p);
    out.feature_names = names;

    std::vector<std::string> bad;
    std::vector<bool> flagged(static_cast<std::size_t>(p), false);
    for (int cls = 1; cls <= 2; ++cls) {
        const auto rows = y.rows_of(cls);
        for (Eigen::Index j = 0; j < p; ++j) {
            ColumnMoments m = class_column_moments(values, rows, j);
            if (scale_reference) {
                m.max_abs = std::max(m.max_abs, (*scale_reference)[static_cast<std::size_t>(j)]);
            }
            out.class_means(cls - 1, j) = m.mean;
            out.class_sds(cls - 1, j) = m.sd;
            if (is_degenerate(m)) {
                if (!flagged[static_cast<std::size_t>(j)]) {
                    flagged[static_cast<std::size_t>(j)] = true;
                    bad.push_back(names[static_cast<std::size_t>(j)]);
                }
                continue;
            }
            for (auto r : rows) {
                auto& v = values(static_cast<Eigen::Index>(r), j);
                v = (v - m.mean) / m.sd;
            }
        }
    }
    if (!bad.empty()) {
        throw DegenerateFeature("zero within-class variance: " + join_names(bad), bad);
    }
    out.values = std::move(values);
    return out;
}

} // namespace

DataMatrix::DataMatrix(Matrix values, std::vector<std::string> feature_names)
    : values_(std::move(values)), names_(std::move(feature_names)) {
    if (names_.size() != static_cast<std::size_t>(values_.cols())) {
        throw ShapeError("expected " + std::to_string(values_.cols()) + " feature names, got " +
                         std::to_string(names_.size()));
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
        if (!seen.insert(name).second) {
            throw ParseError("duplicate feature name: " + name);
        }
    }
    if (!values_.allFinite()) {
        throw ParseError("data matrix contains non-finite values");
    }
}

std::size_t DataMatrix::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw UnknownFeature("unknown feature: " + name);
    }
    return static_cast<std::size_t>(it - names_.begin());
}

DataMatrix DataMatrix::drop_columns(const std::vector<std::size_t>& columns) const {
    std::set<std::size_t> drop(columns.begin(), columns.end());
    std::vector<Eigen::Index> keep;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p(); ++j) {
        if (!drop.count(j)) {
            keep.push_back(static_cast<Eigen::Index>(j));
            names.push_back(names_[j]);
        }
    }
    Matrix out(values_.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        out.col(static_cast<Eigen::Index>(c)) = values_.col(keep[c]);
    }
    return DataMatrix(std::move(out), std::move(names));
}

ClassLabels::ClassLabels(std::vector<int> labels, std::size_t min_class_size) : labels_(std::move(labels)) {
    for (int v : labels_) {
        if (v == 1) {
            ++n1_;
        } else if (v == 2) {
            ++n2_;
        } else {
            throw LabelError("class labels must be 1 or 2, got " + std::to_string(v));
        }
    }
    if (n1_ < min_class_size || n2_ < min_class_size) {
        throw LabelError("each class needs at least " + std::to_string(min_class_size) + " samples (got n1=" +
                         std::to_string(n1_) + ", n2=" + std::to_string(n2_) + ")");
    }
}

std::vector<std::size_t> ClassLabels::rows_of(int cls) const {
    std::vector<std::size_t> rows;
    rows.reserve(size_of(cls));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == cls) {
            rows.push_back(i);
        }
    }
    return rows;
}

ClassLabels ClassLabels::swapped() const {
    std::vector<int> flipped(labels_);
    for (auto& v : flipped) {
        v = 3 - v;
    }
    return ClassLabels(std::move(flipped), 0);
}

std::vector<int> remap_labels(const std::vector<double>& raw) {
    std::set<double> distinct(raw.begin(), raw.end());
    if (distinct.size() != 2) {
        throw LabelError("expected exactly 2 distinct label values, found " + std::to_string(distinct.size()));
    }
    const double lo = *distinct.begin();
    const double hi = *distinct.rbegin();
    int offset = 0;
    if (lo == 1 && hi == 2) {
        offset = 0;
    } else if (lo == 0 && hi == 1) {
        offset = 1;
    } else {
        throw LabelError("label values must be {1,2} or {0,1}");
    }
    std::vector<int> out;
    out.reserve(raw.size());
    for (double v : raw) {
        out.push_back(static_cast<int>(v) + offset);
    }
    return out;
}

std::vector<std::size_t> degenerate_features(const DataMatrix& x, const ClassLabels& y) {
    check_same_n(x, y);
    std::vector<std::size_t> out;
    const auto rows1 = y.rows_of(1);
    const auto rows2 = y.rows_of(2);
    for (std::size_t j = 0; j < x.p(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        if (is_degenerate(class_column_moments(x.values(), rows1, col)) ||
            is_degenerate(class_column_moments(x.values(), rows2, col))) {
            out.push_back(j);
        }
    }
    return out;
}

void require_nondegenerate(const DataMatrix& x, const ClassLabels& y) {
    const auto bad = degenerate_features(x, y);
    if (bad.empty()) {
        return;
    }
    std::vector<std::string> names;
    for (auto j : bad) {
        names.push_back(x.feature_names()[j]);
    }
    throw DegenerateFeature("zero within-class variance: " + join_names(names), names);
}

StandardizedMatrix standardize_within_class(const DataMatrix& x, const ClassLabels& y) {
    check_same_n(x, y);
    return standardize_values(x.values(), y, x.feature_names());
}

StandardizedMatrix project_out_nuisance(const DataMatrix& x, const ClassLabels& y, const NuisanceMatrix& z) {
    check_same_n(x, y);
    if (static_cast<std::size_t>(z.values.rows()) != x.n()) {
        throw ShapeError("nuisance matrix has " + std::to_string(z.values.rows()) + " rows, expected " +
                         std::to_string(x.n()));
    }
    const std::size_t q = z.q();
    const std::size_t smallest = std::min(y.n1(), y.n2());
    if (q + 2 >= smallest) {
        throw InsufficientDF("need q < min(n1, n2) - 2; q=" + std::to_string(q) + ", min class size=" +
                             std::to_string(smallest));
    }

    Matrix residual(x.values().rows(), x.values().cols());
    // Residual sds below 1e-9 of the pre-projection sd count as annihilated.
    std::vector<double> scale(x.p(), 0.0);
    for (int cls = 1; cls <= 2; ++cls) {
        const auto rows = y.rows_of(cls);
        const auto nm = static_cast<Eigen::Index>(rows.size());
        Matrix zm(nm, static_cast<Eigen::Index>(q + 1));
        Matrix xm(nm, x.values().cols());
        for (Eigen::Index i = 0; i < nm; ++i) {
            const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
            zm(i, 0) = 1.0;
            for (std::size_t c = 0; c < q; ++c) {
                zm(i, static_cast<Eigen::Index>(c + 1)) = z.values(r, static_cast<Eigen::Index>(c));
            }
            xm.row(i) = x.values().row(r);
        }
        Eigen::ColPivHouseholderQR<Matrix> qr(zm);
        if (qr.rank() < zm.cols()) {
            throw RankDeficientNuisance("nuisance matrix (with intercept) is rank deficient in class " +
                                        std::to_string(cls) + ": rank " + std::to_string(qr.rank()) + " < " +
                                        std::to_string(zm.cols()));
        }
        // (I - Q1 Q1^T) X: apply Q^T, zero the leading q+1 rows, apply Q.
        Matrix coeffs = qr.householderQ().adjoint() * xm;
        coeffs.topRows(zm.cols()).setZero();
        Matrix resid_m = qr.householderQ() * coeffs;
        for (Eigen::Index i = 0; i < nm; ++i) {
            residual.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)])) = resid_m.row(i);
        }
        for (Eigen::Index j = 0; j < xm.cols(); ++j) {
            const double centered = (xm.col(j).array() - xm.col(j).mean()).matrix().norm() /
                                    std::sqrt(static_cast<double>(nm));
            auto& s = scale[static_cast<std::size_t>(j)];
            s = std::max(s, centered * 1e3);
        }
    }
    auto out = standardize_values(std::move(residual), y, x.feature_names(), &scale);
    out.provenance = Provenance::nuisance_projected;
    return out;
}

} // namespace tmicor
