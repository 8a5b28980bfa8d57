#include "tmicor/pair_set.hpp"
#include "tmicor/data.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/table_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace tmicor {

PairSet PairSet::all_pairs(std::size_t p) {
    PairSet out;
    out.mode_ = Mode::all_pairs;
    out.p_ = p;
    out.row_start_.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        out.row_start_[j] = triangular_offset(j, j + 1, p);
    }
    return out;
}

PairSet PairSet::cross_set(std::size_t p, std::vector<std::size_t> set_a, std::vector<std::size_t> set_b) {
    std::sort(set_a.begin(), set_a.end());
    set_a.erase(std::unique(set_a.begin(), set_a.end()), set_a.end());
    std::sort(set_b.begin(), set_b.end());
    set_b.erase(std::unique(set_b.begin(), set_b.end()), set_b.end());
    if (set_a.empty() || set_b.empty()) {
        throw ValidationError("cross-set mode needs both sets non-empty (|A|=" + std::to_string(set_a.size()) +
                              ", |B|=" + std::to_string(set_b.size()) + ")");
    }
    std::vector<std::size_t> common;
    std::set_intersection(set_a.begin(), set_a.end(), set_b.begin(), set_b.end(), std::back_inserter(common));
    if (!common.empty()) {
        throw OverlappingSets("feature index " + std::to_string(common.front()) + " is in both sets");
    }
    for (auto v : set_a) {
        if (v >= p) {
            throw UnknownFeature("feature index out of range: " + std::to_string(v));
        }
    }
    for (auto v : set_b) {
        if (v >= p) {
            throw UnknownFeature("feature index out of range: " + std::to_string(v));
        }
    }

    PairSet out;
    out.mode_ = Mode::cross_set;
    out.p_ = p;
    out.pairs_.reserve(set_a.size() * set_b.size());
    for (auto a : set_a) {
        for (auto b : set_b) {
            out.pairs_.emplace_back(static_cast<std::uint32_t>(std::min(a, b)), static_cast<std::uint32_t>(std::max(a, b)));
        }
    }
    std::sort(out.pairs_.begin(), out.pairs_.end());
    out.set_a_ = std::move(set_a);
    out.set_b_ = std::move(set_b);
    return out;
}

std::pair<std::size_t, std::size_t> PairSet::at(std::size_t offset) const {
    if (offset >= size()) {
        throw std::out_of_range("pair offset " + std::to_string(offset));
    }
    if (mode_ == Mode::cross_set) {
        return {pairs_[offset].first, pairs_[offset].second};
    }
    // Last row whose start is <= offset.
    auto it = std::upper_bound(row_start_.begin(), row_start_.begin() + static_cast<std::ptrdiff_t>(p_ - 1), offset);
    const auto j = static_cast<std::size_t>(it - row_start_.begin()) - 1;
    return {j, j + 1 + (offset - row_start_[j])};
}

PairSet parse_cross_set(const std::string& path, const DataMatrix& x) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open cross-set file: " + path);
    }
    std::vector<std::size_t> a, b;
    std::set<std::string> in_a, in_b;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto cells = split_line(line, '\t');
        if (cells.size() != 2) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'feature<TAB>A|B'");
        }
        const auto& name = cells[0];
        const auto& tag = cells[1];
        if (tag != "A" && tag != "B") {
            throw ParseError(path + ":" + std::to_string(line_no) + ": set tag must be A or B, got '" + tag + "'");
        }
        auto& mine = tag == "A" ? in_a : in_b;
        auto& other = tag == "A" ? in_b : in_a;
        if (other.count(name)) {
            throw OverlappingSets("feature '" + name + "' is tagged with both A and B");
        }
        if (!mine.insert(name).second) {
            continue;
        }
        (tag == "A" ? a : b).push_back(x.index_of(name));
    }
    return PairSet::cross_set(x.p(), std::move(a), std::move(b));
}

} // namespace tmicor
