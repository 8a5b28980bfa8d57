#include "tmicor/null_pool.hpp"
#include "tmicor/correlation.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/rng.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <exception>
#include <istream>
#include <ostream>
#include <span>

namespace tmicor {

namespace {

constexpr std::size_t max_redraws = 10000;

std::vector<std::size_t> rows_with(const std::vector<int>& labels, int cls) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == cls) {
            rows.push_back(i);
        }
    }
    return rows;
}

template <typename T>
void put_le(std::ostream& out, T value) {
    unsigned char buf[sizeof(T)];
    auto bits = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf[i] = static_cast<unsigned char>(bits >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
        throw ParseError("truncated null pool file");
    }
    using Bits = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    Bits bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bits |= static_cast<Bits>(buf[i]) << (8 * i);
    }
    return std::bit_cast<T>(bits);
}

} // namespace

std::size_t NullPool::count_above(double threshold) const {
    return static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), threshold));
}

std::vector<int> permuted_labels(const ClassLabels& y, std::uint64_t seed, std::uint64_t index) {
    auto rng = substream(seed, index);
    std::vector<int> labels = y.labels();
    std::shuffle(labels.begin(), labels.end(), rng);
    return labels;
}

NullPool generate_null_pool(const StandardizedMatrix& xstd, const ClassLabels& y, const PairSet& pairs,
                            const PermutationPlan& plan) {
    if (plan.permutations < 1) {
        throw ValidationError("permutation count must be at least 1");
    }
    if (static_cast<std::size_t>(xstd.values.rows()) != y.n() ||
        static_cast<std::size_t>(xstd.values.cols()) != pairs.p()) {
        throw ShapeError("standardized matrix does not match labels or pair set");
    }

    NullPool pool;
    pool.permutations = plan.permutations;
    pool.pairs = pairs.size();
    pool.seed = plan.seed;
    pool.values.assign(plan.permutations * pairs.size(), 0.0);
    pool.perm_balance.assign(plan.permutations, 0.0);
    pool.per_perm_offsets.resize(plan.permutations + 1);
    for (std::size_t a = 0; a <= plan.permutations; ++a) {
        pool.per_perm_offsets[a] = a * pairs.size();
    }

    const auto total = static_cast<std::ptrdiff_t>(plan.permutations);
    std::size_t redraws = 0;
    std::size_t saturated = 0;
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic) reduction(+ : redraws, saturated)
    for (std::ptrdiff_t ai = 0; ai < total; ++ai) {
        try {
            const auto a = static_cast<std::size_t>(ai);
            auto rng = substream(plan.seed, a);
            std::vector<int> labels = y.labels();
            Matrix block1, block2;
            for (std::size_t attempt = 0;; ++attempt) {
                if (attempt > max_redraws) {
                    throw Error("could not draw a non-degenerate permutation after " + std::to_string(max_redraws) +
                                " attempts");
                }
                if (!plan.force_identity) {
                    labels = y.labels();
                    std::shuffle(labels.begin(), labels.end(), rng);
                }
                block1 = gather_rows(xstd.values, rows_with(labels, 1));
                block2 = gather_rows(xstd.values, rows_with(labels, 2));
                if (plan.mode == PermutationMode::raw) {
                    break;
                }
                if (standardize_columns(block1) && standardize_columns(block2)) {
                    break;
                }
                if (plan.force_identity) {
                    throw DegenerateFeature("identity relabeling has a constant column", {});
                }
                ++redraws;
            }
            std::size_t kept = 0;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                kept += (y.labels()[i] == 1 && labels[i] == 1) ? 1 : 0;
            }
            pool.perm_balance[a] = static_cast<double>(kept) / static_cast<double>(y.n1());

            const Matrix r1 = gram_correlation(block1);
            const Matrix r2 = gram_correlation(block2);
            std::span<double> slice(pool.values.data() + pool.per_perm_offsets[a], pairs.size());
            saturated += abs_pair_statistics(r1, r2, pairs, slice);
        } catch (...) {
#pragma omp critical(tmicor_null_pool_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    pool.redraws = redraws;
    pool.saturated = saturated;
    pool.sorted = pool.values;
    std::sort(pool.sorted.begin(), pool.sorted.end());
    return pool;
}

void write_null_pool(std::ostream& out, const NullPool& pool) {
    out.write("TMIC", 4);
    put_le<std::uint32_t>(out, null_pool_format_version);
    put_le<std::uint64_t>(out, pool.permutations);
    put_le<std::uint64_t>(out, pool.pairs);
    put_le<std::uint64_t>(out, pool.seed);
    for (double v : pool.values) {
        put_le<double>(out, v);
    }
    if (!out) {
        throw IoError("failed writing null pool");
    }
}

NullPool read_null_pool(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "TMIC", 4) != 0) {
        throw ParseError("not a null pool file (bad magic)");
    }
    const auto version = get_le<std::uint32_t>(in);
    if (version != null_pool_format_version) {
        throw ParseError("unsupported null pool version " + std::to_string(version));
    }
    NullPool pool;
    pool.permutations = static_cast<std::size_t>(get_le<std::uint64_t>(in));
    pool.pairs = static_cast<std::size_t>(get_le<std::uint64_t>(in));
    pool.seed = get_le<std::uint64_t>(in);
    pool.values.resize(pool.permutations * pool.pairs);
    for (auto& v : pool.values) {
        v = get_le<double>(in);
    }
    pool.per_perm_offsets.resize(pool.permutations + 1);
    for (std::size_t a = 0; a <= pool.permutations; ++a) {
        pool.per_perm_offsets[a] = a * pool.pairs;
    }
    pool.sorted = pool.values;
    std::sort(pool.sorted.begin(), pool.sorted.end());
    return pool;
}

} // namespace tmicor
