#ifndef TMICOR_TABLE_IO_HPP
#define TMICOR_TABLE_IO_HPP

#include "tmicor/data.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tmicor {

enum class TableFormat { tsv, csv };

/// Picks the format from the file extension (".csv" -> csv, otherwise tsv).
TableFormat format_from_path(const std::string& path);

char delimiter_of(TableFormat format);

/// A parsed numeric table: header names plus one row per sample.
struct RawTable {
    std::vector<std::string> header;
    Matrix values;
};

/// Parses a delimited numeric table with a header row. Throws `ParseError` on a
/// non-numeric or non-finite cell and `ShapeError` on ragged rows.
RawTable parse_table(std::istream& in, TableFormat format, const std::string& source = "<stream>");
RawTable read_table(const std::string& path, TableFormat format);

struct LoadOptions {
    TableFormat format = TableFormat::tsv;
    /// Either the name of a column in the data file or the path of a sidecar
    /// single-column label file (optionally with a header line).
    std::string label_source;
    /// Columns moved out of the feature matrix into the nuisance matrix.
    std::vector<std::string> nuisance_columns;
    /// Remove within-class constant columns instead of failing.
    bool drop_degenerate = false;
    std::size_t min_class_size = ClassLabels::default_min_class_size;
};

struct Dataset {
    DataMatrix x;
    ClassLabels y;
    NuisanceMatrix z;
    std::vector<std::string> dropped_features;
};

/**
 * Loads and validates a dataset. Errors: `ParseError`, `ShapeError`,
 * `LabelError` (not exactly two label values, or a class smaller than the
 * minimum) and `DegenerateFeature` (unless `drop_degenerate` is set).
 */
Dataset load_dataset(const std::string& path, const LoadOptions& options);

/// 17 significant digits, enough for every double to read back exactly.
std::string format_double(double v);

/// Canonical writer: header of feature names then one row per sample.
void write_table(std::ostream& out, const DataMatrix& x, TableFormat format = TableFormat::tsv);

/// Writes "# key=value" lines, the config echo carried by every output file.
void write_comment_header(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& config);

/// Splits one line on `delim`, stripping a trailing '\r'.
std::vector<std::string> split_line(const std::string& line, char delim);

} // namespace tmicor

#endif
