#ifndef TMICOR_PAIR_SET_HPP
#define TMICOR_PAIR_SET_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tmicor {

class DataMatrix;

/// Number of unordered pairs among `p` features.
constexpr std::size_t pair_count(std::size_t p) {
    return p < 2 ? 0 : p * (p - 1) / 2;
}

/// Offset of pair (j, k), j < k, in the lexicographic strict upper triangle.
constexpr std::size_t triangular_offset(std::size_t j, std::size_t k, std::size_t p) {
    return j * p - j * (j + 1) / 2 + (k - j - 1);
}

/**
 * @brief The feature pairs under test.
 *
 * Either every j < k pair of `p` features, or the cross product of two
 * disjoint feature sets. Pairs are always reported with j < k, enumerated in
 * lexicographic (j, k) order, and addressed by a dense offset.
 */
class PairSet {
public:
    enum class Mode { all_pairs, cross_set };

    static PairSet all_pairs(std::size_t p);
    /// Throws `OverlappingSets` when the sets intersect and `ValidationError`
    /// when either set is empty.
    static PairSet cross_set(std::size_t p, std::vector<std::size_t> set_a, std::vector<std::size_t> set_b);

    Mode mode() const { return mode_; }
    std::size_t p() const { return p_; }
    std::size_t size() const { return mode_ == Mode::all_pairs ? pair_count(p_) : pairs_.size(); }

    std::pair<std::size_t, std::size_t> at(std::size_t offset) const;

    const std::vector<std::size_t>& set_a() const { return set_a_; }
    const std::vector<std::size_t>& set_b() const { return set_b_; }

    /// Calls `f(offset, j, k)` for every pair in order.
    template <typename F>
    void for_each(F&& f) const {
        if (mode_ == Mode::all_pairs) {
            std::size_t offset = 0;
            for (std::size_t j = 0; j + 1 < p_; ++j) {
                for (std::size_t k = j + 1; k < p_; ++k) {
                    f(offset++, j, k);
                }
            }
        } else {
            for (std::size_t o = 0; o < pairs_.size(); ++o) {
                f(o, static_cast<std::size_t>(pairs_[o].first), static_cast<std::size_t>(pairs_[o].second));
            }
        }
    }

private:
    Mode mode_ = Mode::all_pairs;
    std::size_t p_ = 0;
    std::vector<std::size_t> row_start_;
    std::vector<std::size_t> set_a_, set_b_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
};

/**
 * Reads a two-column "feature<TAB>set" file, set tags being A or B, and builds
 * a cross-set PairSet over the features of `x`. Features not listed are left
 * out. Errors: `UnknownFeature`, `OverlappingSets`, `ParseError`, and
 * `ValidationError` when no pairs remain.
 */
PairSet parse_cross_set(const std::string& path, const DataMatrix& x);

} // namespace tmicor

#endif
