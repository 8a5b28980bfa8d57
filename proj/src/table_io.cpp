#include "tmicor/table_io.hpp"
#include "tmicor/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tmicor {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

bool parse_number(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) {
        return false;
    }
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (*begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

// Reads a one-column label file; a non-numeric first line is taken as a header.
std::vector<double> read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open label file: " + path);
    }
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (is_blank(line) || line[0] == '#') {
            continue;
        }
        double v = 0;
        if (!parse_number(line, v)) {
            if (out.empty() && line_no == 1) {
                continue;
            }
            throw ParseError(path + ":" + std::to_string(line_no) + ": malformed label '" + line + "'");
        }
        out.push_back(v);
    }
    return out;
}

} // namespace

TableFormat format_from_path(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    return ext == ".csv" ? TableFormat::csv : TableFormat::tsv;
}

char delimiter_of(TableFormat format) {
    return format == TableFormat::csv ? ',' : '\t';
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

RawTable parse_table(std::istream& in, TableFormat format, const std::string& source) {
    const char delim = delimiter_of(format);
    RawTable table;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line) || line[0] == '#') {
            continue;
        }
        auto cells = split_line(line, delim);
        if (!have_header) {
            for (auto& c : cells) {
                table.header.push_back(trim(c));
            }
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ShapeError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " cells, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_number(cells[c], row[c]) || !std::isfinite(row[c])) {
                throw ParseError(source + ":" + std::to_string(line_no) + ": malformed cell '" + cells[c] +
                                 "' in column " + table.header[c]);
            }
        }
        rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw ParseError(source + ": empty table");
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
        }
    }
    return table;
}

RawTable read_table(const std::string& path, TableFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open data file: " + path);
    }
    return parse_table(in, format, path);
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
    RawTable table = read_table(path, options.format);
    const auto n = table.values.rows();

    std::vector<double> raw_labels;
    std::vector<bool> excluded(table.header.size(), false);
    auto column_of = [&](const std::string& name) -> std::size_t {
        auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) {
            throw UnknownFeature("column '" + name + "' not found in " + path);
        }
        return static_cast<std::size_t>(it - table.header.begin());
    };

    if (options.label_source.empty()) {
        throw LabelError("no label column or label file given");
    }
    auto in_header = std::find(table.header.begin(), table.header.end(), options.label_source);
    if (in_header != table.header.end()) {
        const auto c = static_cast<std::size_t>(in_header - table.header.begin());
        excluded[c] = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            raw_labels.push_back(table.values(i, static_cast<Eigen::Index>(c)));
        }
    } else if (std::filesystem::exists(options.label_source)) {
        raw_labels = read_label_file(options.label_source);
        if (static_cast<Eigen::Index>(raw_labels.size()) != n) {
            throw ShapeError("label file has " + std::to_string(raw_labels.size()) + " entries, data has " +
                             std::to_string(n) + " samples");
        }
    } else {
        throw LabelError("'" + options.label_source + "' is neither a column of " + path + " nor a label file");
    }

    Dataset out;
    out.y = ClassLabels(remap_labels(raw_labels), options.min_class_size);

    std::vector<std::size_t> nuisance_cols;
    for (const auto& name : options.nuisance_columns) {
        const auto c = column_of(name);
        if (excluded[c]) {
            throw ShapeError("column '" + name + "' cannot be both label and nuisance");
        }
        excluded[c] = true;
        nuisance_cols.push_back(c);
    }
    out.z.values.resize(n, static_cast<Eigen::Index>(nuisance_cols.size()));
    for (std::size_t k = 0; k < nuisance_cols.size(); ++k) {
        out.z.values.col(static_cast<Eigen::Index>(k)) = table.values.col(static_cast<Eigen::Index>(nuisance_cols[k]));
        out.z.names.push_back(table.header[nuisance_cols[k]]);
    }

    std::vector<std::string> names;
    std::vector<Eigen::Index> feature_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (!excluded[c]) {
            names.push_back(table.header[c]);
            feature_cols.push_back(static_cast<Eigen::Index>(c));
        }
    }
    Matrix x(n, static_cast<Eigen::Index>(feature_cols.size()));
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
        x.col(static_cast<Eigen::Index>(k)) = table.values.col(feature_cols[k]);
    }
    out.x = DataMatrix(std::move(x), std::move(names));

    if (options.drop_degenerate) {
        const auto bad = degenerate_features(out.x, out.y);
        for (auto j : bad) {
            out.dropped_features.push_back(out.x.feature_names()[j]);
        }
        if (!bad.empty()) {
            out.x = out.x.drop_columns(bad);
        }
    } else {
        require_nondegenerate(out.x, out.y);
    }
    if (out.x.p() < 2) {
        throw ShapeError("need at least 2 features, found " + std::to_string(out.x.p()));
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_table(std::ostream& out, const DataMatrix& x, TableFormat format) {
    const char delim = delimiter_of(format);
    const auto& names = x.feature_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) {
            out << delim;
        }
        out << names[j];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < x.values().rows(); ++i) {
        for (Eigen::Index j = 0; j < x.values().cols(); ++j) {
            if (j) {
                out << delim;
            }
            out << format_double(x.values()(i, j));
        }
        out << '\n';
    }
}

void write_comment_header(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& config) {
    for (const auto& [key, value] : config) {
        out << "# " << key << '=' << value << '\n';
    }
}

} // namespace tmicor
