#ifndef TMICOR_NULL_POOL_HPP
#define TMICOR_NULL_POOL_HPP

#include "tmicor/data.hpp"
#include "tmicor/pair_set.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tmicor {

/**
 * How permuted statistics are recomputed.
 *
 * `restandardize` re-centres and re-scales each permuted class before
 * correlating (full sample correlations). `raw` reuses the standardization
 * fitted on the original classes and divides the cross products by the
 * permuted group size.
 */
enum class PermutationMode { restandardize, raw };

struct PermutationPlan {
    std::size_t permutations = 100;
    std::uint64_t seed = 0;
    PermutationMode mode = PermutationMode::restandardize;
    /// Test hook: every "permutation" keeps the original labels.
    bool force_identity = false;
};

/// Permuted |T*| values for every pair and permutation.
struct NullPool {
    /// |T*| laid out permutation by permutation, each slice in pair order.
    std::vector<double> values;
    /// `permutations + 1` slice boundaries into `values`.
    std::vector<std::size_t> per_perm_offsets;
    /// Fraction of class-1 samples that stay in class 1, per permutation.
    std::vector<double> perm_balance;
    /// Ascending copy of `values`, used for threshold counting.
    std::vector<double> sorted;

    std::size_t permutations = 0;
    std::size_t pairs = 0;
    std::uint64_t seed = 0;
    std::size_t redraws = 0;
    std::size_t saturated = 0;

    /// #{|T*| > threshold} over the whole pool.
    std::size_t count_above(double threshold) const;
};

/**
 * Relabels the rows of the already-standardized matrix `A` times, preserving
 * the class sizes, and recomputes the pair statistics for each relabeling.
 * Permutation `a` draws from RNG substream (seed, a), so the pool does not
 * depend on scheduling. In `restandardize` mode a relabeling that leaves a
 * constant column in either class is redrawn from the same substream.
 */
NullPool generate_null_pool(const StandardizedMatrix& xstd, const ClassLabels& y, const PairSet& pairs,
                            const PermutationPlan& plan);

/// Random class-size-preserving relabeling drawn from substream (seed, index).
std::vector<int> permuted_labels(const ClassLabels& y, std::uint64_t seed, std::uint64_t index);

/// Binary pool dump: "TMIC", u32 version, u64 A, u64 #pairs, u64 seed, then
/// A * #pairs little-endian float64 values in permutation order.
void write_null_pool(std::ostream& out, const NullPool& pool);
NullPool read_null_pool(std::istream& in);

inline constexpr std::uint32_t null_pool_format_version = 1;

} // namespace tmicor

#endif
