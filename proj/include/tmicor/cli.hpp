#ifndef TMICOR_CLI_HPP
#define TMICOR_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tmicor {

inline constexpr const char* version_string = "0.1.0";

/// Everything a run needs; echoed into the manifest so the run can be repeated.
struct RunConfig {
    std::string subcommand;
    std::string data;
    std::string labels;
    std::string format = "auto";
    std::size_t permutations = 100;
    std::optional<std::uint64_t> seed;
    std::string null_method = "permutation";
    std::string mode = "restandardize";
    double cutoff = 0.1;
    std::string sign = "both";
    std::string cross_set;
    std::vector<std::string> nuisance;
    int threads = 0;
    std::string out_dir = "tmicor_out";
    std::size_t max_rank = 0;
    bool monotone = false;
    bool drop_degenerate = false;
    bool dump_null = false;
    // simulate
    std::string config;
    std::optional<std::size_t> trials;
    // graph
    std::string fdr_report;
    std::size_t top_per_component = 0;
    std::string graph_format = "edge-tsv";
    std::string output;
    // rerun
    std::string manifest;
};

/**
 * Runs the command line `args` (without the program name). Exit codes: 0 on
 * success, 2 on usage or input validation errors, 1 on internal errors.
 * Progress lines go to `log`, help text to `out`.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

/// Reads a manifest into its key/value entries.
std::map<std::string, std::string> read_manifest(const std::string& path);

} // namespace tmicor

#endif
