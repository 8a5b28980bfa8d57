#ifndef TMICOR_DATA_HPP
#define TMICOR_DATA_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

/**
 * @file data.hpp
 * @brief Dataset containers, within-class standardization and nuisance projection.
 */

namespace tmicor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * @brief Dense samples-by-features matrix with unique feature names.
 *
 * Construction validates that every entry is finite and that the names are
 * unique and match the column count.
 */
class DataMatrix {
public:
    DataMatrix() = default;
    DataMatrix(Matrix values, std::vector<std::string> feature_names);

    const Matrix& values() const { return values_; }
    const std::vector<std::string>& feature_names() const { return names_; }
    std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(values_.cols()); }

    /// Index of a feature by name, throws `UnknownFeature`.
    std::size_t index_of(const std::string& name) const;

    /// Copy with the listed columns removed.
    DataMatrix drop_columns(const std::vector<std::size_t>& columns) const;

private:
    Matrix values_;
    std::vector<std::string> names_;
};

/**
 * @brief Class assignment in {1, 2} for every sample.
 *
 * Both classes must hold at least `min_class_size` samples (4 by default, the
 * smallest size for which the Fisher-z variance 1/(n_m - 3) is defined).
 */
class ClassLabels {
public:
    static constexpr std::size_t default_min_class_size = 4;

    ClassLabels() = default;
    explicit ClassLabels(std::vector<int> labels, std::size_t min_class_size = default_min_class_size);

    const std::vector<int>& labels() const { return labels_; }
    std::size_t n() const { return labels_.size(); }
    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }
    std::size_t size_of(int cls) const { return cls == 1 ? n1_ : n2_; }

    /// Sample indices of class `cls`, in increasing order.
    std::vector<std::size_t> rows_of(int cls) const;

    /// Labels with 1 and 2 exchanged.
    ClassLabels swapped() const;

private:
    std::vector<int> labels_;
    std::size_t n1_ = 0;
    std::size_t n2_ = 0;
};

/// Maps raw label values onto {1, 2}. Accepts {1, 2} as is and {0, 1} with
/// 0 -> 1, 1 -> 2. Anything else, or a single distinct value, is a `LabelError`.
std::vector<int> remap_labels(const std::vector<double>& raw);

enum class Provenance { plain, nuisance_projected };

/**
 * @brief Output of within-class standardization.
 *
 * Within each class every column has mean 0 and standard deviation 1, with the
 * standard deviation computed using divisor n_m.
 */
struct StandardizedMatrix {
    Matrix values;
    Matrix class_means; ///< 2 x p, row 0 is class 1
    Matrix class_sds;   ///< 2 x p
    Provenance provenance = Provenance::plain;
    std::vector<std::string> feature_names;
};

/// Confounders Z, one row per sample.
struct NuisanceMatrix {
    Matrix values;
    std::vector<std::string> names;

    std::size_t q() const { return static_cast<std::size_t>(values.cols()); }
};

/// Columns whose within-class standard deviation is zero in either class.
std::vector<std::size_t> degenerate_features(const DataMatrix& x, const ClassLabels& y);

/// Throws `DegenerateFeature` naming every column reported by `degenerate_features`.
void require_nondegenerate(const DataMatrix& x, const ClassLabels& y);

StandardizedMatrix standardize_within_class(const DataMatrix& x, const ClassLabels& y);

/**
 * Regresses Z (plus an intercept) out of X separately within each class, then
 * standardizes the residuals within class. Done once, before any permutation.
 */
StandardizedMatrix project_out_nuisance(const DataMatrix& x, const ClassLabels& y, const NuisanceMatrix& z);

} // namespace tmicor

#endif
