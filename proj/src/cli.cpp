#include "tmicor/cli.hpp"
#include "tmicor/correlation.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/fdr.hpp"
#include "tmicor/graph.hpp"
#include "tmicor/logistic.hpp"
#include "tmicor/null_pool.hpp"
#include "tmicor/simulate.hpp"
#include "tmicor/table_io.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace tmicor {

namespace {

namespace fs = std::filesystem;

using Entries = std::vector<std::pair<std::string, std::string>>;

const std::set<std::string> boolean_keys = {"monotone", "drop-degenerate", "dump-null"};

std::string absolute_if_file(const std::string& path) {
    if (!path.empty() && fs::exists(path)) {
        return fs::absolute(path).lexically_normal().string();
    }
    return path;
}

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) {
            out += sep;
        }
        out += items[i];
    }
    return out;
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

void write_manifest(const fs::path& path, const std::string& command, const Entries& config, const Entries& stats) {
    auto out = open_output(path);
    out << "# tmicor run manifest\n";
    out << "command=" << command << '\n';
    out << "version=" << version_string << '\n';
    for (const auto& [k, v] : config) {
        out << k << '=' << v << '\n';
    }
    for (const auto& [k, v] : stats) {
        out << "stat." << k << '=' << v << '\n';
    }
    close_output(out, path);
}

TableFormat resolve_format(const RunConfig& cfg) {
    if (cfg.format == "tsv") {
        return TableFormat::tsv;
    }
    if (cfg.format == "csv") {
        return TableFormat::csv;
    }
    return format_from_path(cfg.data);
}

void apply_threads(const RunConfig& cfg) {
    if (cfg.threads > 0) {
        omp_set_num_threads(cfg.threads);
    }
}

std::uint64_t resolve_seed(RunConfig& cfg, std::ostream& log) {
    if (!cfg.seed) {
        std::random_device rd;
        cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        log << "[tmicor] no --seed given, using seed=" << *cfg.seed << '\n';
    }
    return *cfg.seed;
}

Dataset load_for(const RunConfig& cfg, bool with_nuisance) {
    LoadOptions options;
    options.format = resolve_format(cfg);
    options.label_source = cfg.labels;
    if (with_nuisance) {
        options.nuisance_columns = cfg.nuisance;
    }
    options.drop_degenerate = cfg.drop_degenerate;
    return load_dataset(cfg.data, options);
}

Entries data_echo(const RunConfig& cfg) {
    return {{"data", absolute_if_file(cfg.data)},
            {"labels", absolute_if_file(cfg.labels)},
            {"format", cfg.format},
            {"cross-set", absolute_if_file(cfg.cross_set)},
            {"drop-degenerate", cfg.drop_degenerate ? "true" : "false"}};
}

Entries test_echo(const RunConfig& cfg) {
    Entries e = data_echo(cfg);
    e.insert(e.end(), {{"permutations", std::to_string(cfg.permutations)},
                       {"seed", std::to_string(*cfg.seed)},
                       {"null", cfg.null_method},
                       {"mode", cfg.mode},
                       {"cutoff", format_double(cfg.cutoff)},
                       {"sign", cfg.sign},
                       {"nuisance", join(cfg.nuisance, ',')},
                       {"max-rank", std::to_string(cfg.max_rank)},
                       {"monotone", cfg.monotone ? "true" : "false"},
                       {"dump-null", cfg.dump_null ? "true" : "false"}});
    return e;
}

PairSet pairs_for(const RunConfig& cfg, const DataMatrix& x) {
    return cfg.cross_set.empty() ? PairSet::all_pairs(x.p()) : parse_cross_set(cfg.cross_set, x);
}

int cmd_test(RunConfig& cfg, std::ostream& log) {
    if (cfg.null_method != "permutation" && cfg.null_method != "theoretical") {
        throw ValidationError("--null must be permutation or theoretical");
    }
    if (cfg.mode != "restandardize" && cfg.mode != "raw") {
        throw ValidationError("--mode must be restandardize or raw");
    }
    if (!(cfg.cutoff > 0.0 && cfg.cutoff <= 1.0)) {
        throw ValidationError("--cutoff must be in (0, 1]");
    }
    if (cfg.permutations < 1) {
        throw ValidationError("--permutations must be at least 1");
    }
    parse_sign(cfg.sign);
    resolve_seed(cfg, log);
    apply_threads(cfg);

    log << "[tmicor] loading " << cfg.data << '\n';
    const Dataset ds = load_for(cfg, true);
    for (const auto& name : ds.dropped_features) {
        log << "[tmicor] dropped degenerate feature " << name << '\n';
    }
    log << "[tmicor] n=" << ds.x.n() << " (n1=" << ds.y.n1() << ", n2=" << ds.y.n2() << "), p=" << ds.x.p()
        << ", q=" << ds.z.q() << '\n';

    const PairSet pairs = pairs_for(cfg, ds.x);
    const auto xstd = ds.z.q() > 0 ? project_out_nuisance(ds.x, ds.y, ds.z) : standardize_within_class(ds.x, ds.y);
    log << "[tmicor] computing statistics for " << pairs.size() << " pairs\n";
    const auto stats = pair_statistics(class_correlations(xstd, ds.y), pairs);
    const std::size_t max_rank = cfg.max_rank == 0 ? pairs.size() : std::min(cfg.max_rank, pairs.size());

    FdrCurve curve;
    NullPool pool;
    if (cfg.null_method == "permutation") {
        PermutationPlan plan;
        plan.permutations = cfg.permutations;
        plan.seed = *cfg.seed;
        plan.mode = cfg.mode == "raw" ? PermutationMode::raw : PermutationMode::restandardize;
        log << "[tmicor] generating null pool (" << plan.permutations << " permutations)\n";
        pool = generate_null_pool(xstd, ds.y, pairs, plan);
        curve = estimate_fdr(stats.stats, pool, max_rank);
    } else {
        curve = theoretical_fdr(stats.stats, ds.y.n1(), ds.y.n2(), max_rank);
    }
    if (cfg.monotone) {
        make_monotone(curve);
    }

    std::size_t significant = 0;
    for (std::size_t l = 0; l < curve.size(); ++l) {
        if (curve.fdr_hat[l] <= cfg.cutoff) {
            significant = l + 1;
        }
    }
    log << "[tmicor] " << significant << " interactions at FDR cutoff " << format_double(cfg.cutoff) << '\n';

    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const Entries echo = test_echo(cfg);
    Entries header = echo;
    header.insert(header.begin(), {"command", "test"});
    {
        auto out = open_output(dir / "statistics.tsv");
        write_statistics_tsv(out, stats.stats, ds.x.feature_names(), header);
        close_output(out, dir / "statistics.tsv");
    }
    {
        auto out = open_output(dir / "fdr.tsv");
        write_fdr_report(out, curve, stats.stats, ds.x.feature_names(), header);
        close_output(out, dir / "fdr.tsv");
    }
    if (cfg.dump_null && cfg.null_method == "permutation") {
        auto out = open_output(dir / "null_pool.bin", std::ios::out | std::ios::binary);
        write_null_pool(out, pool);
        close_output(out, dir / "null_pool.bin");
    }
    Entries counters = {{"pairs", std::to_string(pairs.size())},
                        {"saturated", std::to_string(stats.saturated)},
                        {"null_saturated", std::to_string(pool.saturated)},
                        {"redraws", std::to_string(pool.redraws)},
                        {"significant_at_cutoff", std::to_string(significant)},
                        {"dropped_features", join(ds.dropped_features, ',')}};
    write_manifest(dir / "manifest.txt", "test", echo, counters);
    log << "[tmicor] wrote " << dir.string() << '\n';
    return 0;
}

int cmd_baseline(RunConfig& cfg, std::ostream& log) {
    apply_threads(cfg);
    log << "[tmicor] loading " << cfg.data << '\n';
    const Dataset ds = load_for(cfg, false);
    const PairSet pairs = pairs_for(cfg, ds.x);
    log << "[tmicor] fitting " << pairs.size() << " pairwise logistic models\n";
    const auto result = run_baseline(ds.x, ds.y, pairs);
    std::size_t separated = 0, unconverged = 0;
    for (const auto& r : result.rows) {
        separated += r.fit.separated ? 1 : 0;
        unconverged += (!r.fit.separated && !r.fit.converged) ? 1 : 0;
    }
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const Entries echo = data_echo(cfg);
    Entries header = echo;
    header.insert(header.begin(), {"command", "baseline"});
    {
        auto out = open_output(dir / "baseline.tsv");
        write_baseline_report(out, result, ds.x.feature_names(), header);
        close_output(out, dir / "baseline.tsv");
    }
    write_manifest(dir / "manifest.txt", "baseline", echo,
                   {{"pairs", std::to_string(pairs.size())},
                    {"separated", std::to_string(separated)},
                    {"not_converged", std::to_string(unconverged)}});
    log << "[tmicor] wrote " << dir.string() << '\n';
    return 0;
}

int run_simulation(const SimulationConfig& sim, const RunConfig& cfg, std::ostream& log) {
    apply_threads(cfg);
    log << "[tmicor] simulating " << sim.trials << " trials, p=" << sim.p() << ", n=" << sim.n_per_class
        << " per class\n";
    const auto result = run_experiment(sim);
    std::size_t saturated = 0, redraws = 0;
    for (const auto& t : result.trials) {
        saturated += t.saturated;
        redraws += t.redraws;
    }
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const Entries echo = describe(sim);
    Entries header = echo;
    header.insert(header.begin(), {"command", "simulate"});
    {
        auto out = open_output(dir / "simulation.tsv");
        write_experiment_tsv(out, result, header);
        close_output(out, dir / "simulation.tsv");
    }
    {
        auto out = open_output(dir / "simulation_plot.csv");
        write_plot_csv(out, result);
        close_output(out, dir / "simulation_plot.csv");
    }
    write_manifest(dir / "manifest.txt", "simulate", echo,
                   {{"saturated", std::to_string(saturated)}, {"redraws", std::to_string(redraws)}});
    log << "[tmicor] wrote " << dir.string() << '\n';
    return 0;
}

int cmd_simulate(RunConfig& cfg, std::ostream& log) {
    SimulationConfig sim = cfg.config.empty() ? SimulationConfig{} : read_simulation_config(cfg.config);
    if (cfg.seed) {
        sim.seed = *cfg.seed;
    } else if (cfg.config.empty()) {
        sim.seed = resolve_seed(cfg, log);
    }
    if (cfg.trials) {
        sim.trials = *cfg.trials;
    }
    sim.validate();
    return run_simulation(sim, cfg, log);
}

int cmd_graph(RunConfig& cfg, std::ostream& out_stream, std::ostream& log) {
    std::ifstream in(cfg.fdr_report);
    if (!in) {
        throw IoError("cannot open FDR report " + cfg.fdr_report);
    }
    const auto rows = read_fdr_report(in);
    auto g = build_graph(ranked_pairs(rows), cfg.cutoff, parse_sign(cfg.sign));
    if (cfg.top_per_component > 0) {
        g = top_edges_per_component(g, cfg.top_per_component);
    }
    log << "[tmicor] graph: " << g.nodes.size() << " nodes, " << g.edges.size() << " edges, " << g.components.size()
        << " components\n";
    const auto format = parse_graph_format(cfg.graph_format);
    if (cfg.output.empty() || cfg.output == "-") {
        emit(out_stream, g, format);
    } else {
        auto out = open_output(cfg.output);
        emit(out, g, format);
        close_output(out, cfg.output);
    }
    return 0;
}

void add_data_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--data", cfg.data, "Samples x features table (header row = feature names)")->required();
    sub->add_option("--labels", cfg.labels, "Label column name or single-column label file")->required();
    sub->add_option("--format", cfg.format, "Input format")->check(CLI::IsMember({"auto", "tsv", "csv"}));
    sub->add_option("--cross-set", cfg.cross_set, "Two-column feature/set file restricting pairs to A x B");
    sub->add_flag("--drop-degenerate", cfg.drop_degenerate, "Drop within-class constant features instead of failing");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = runtime default)");
    sub->add_option("--out", cfg.out_dir, "Output directory");
}

int dispatch(RunConfig& cfg, std::ostream& out, std::ostream& log);

int cmd_rerun(RunConfig& cfg, std::ostream& log) {
    const auto entries = read_manifest(cfg.manifest);
    const auto command = entries.find("command");
    if (command == entries.end()) {
        throw ParseError("manifest has no command entry");
    }
    if (command->second == "simulate") {
        std::stringstream text;
        for (const auto& [k, v] : entries) {
            if (k != "command" && k != "version" && k.rfind("stat.", 0) != 0) {
                text << k << " = " << v << '\n';
            }
        }
        return run_simulation(parse_simulation_config(text), cfg, log);
    }
    std::vector<std::string> args{command->second};
    for (const auto& [k, v] : entries) {
        if (k == "command" || k == "version" || k.rfind("stat.", 0) == 0) {
            continue;
        }
        if (boolean_keys.count(k)) {
            if (v == "true") {
                args.push_back("--" + k);
            }
        } else if (!v.empty()) {
            args.push_back("--" + k);
            args.push_back(v);
        }
    }
    args.push_back("--out");
    args.push_back(cfg.out_dir);
    if (cfg.threads > 0) {
        args.push_back("--threads");
        args.push_back(std::to_string(cfg.threads));
    }
    log << "[tmicor] rerun: " << join(args, ' ') << '\n';
    return run_cli(args, std::cout, log);
}

int dispatch(RunConfig& cfg, std::ostream& out, std::ostream& log) {
    if (cfg.subcommand == "test") {
        return cmd_test(cfg, log);
    }
    if (cfg.subcommand == "baseline") {
        return cmd_baseline(cfg, log);
    }
    if (cfg.subcommand == "simulate") {
        return cmd_simulate(cfg, log);
    }
    if (cfg.subcommand == "graph") {
        return cmd_graph(cfg, out, log);
    }
    if (cfg.subcommand == "rerun") {
        return cmd_rerun(cfg, log);
    }
    throw ValidationError("unknown subcommand");
}

} // namespace

std::map<std::string, std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open manifest " + path);
    }
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("malformed manifest line: " + line);
        }
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
    RunConfig cfg;
    CLI::App app{"tmicor: two-class marginal interaction testing via Fisher-z correlation differences"};
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    auto* test = app.add_subcommand("test", "Permutation (or theoretical) FDR for correlation-difference statistics");
    add_data_options(test, cfg);
    test->add_option("--permutations", cfg.permutations, "Number of label permutations A");
    test->add_option("--seed", cfg.seed, "Seed for every random draw (generated and echoed when absent)");
    test->add_option("--null", cfg.null_method, "Null method")->check(CLI::IsMember({"permutation", "theoretical"}));
    test->add_option("--mode", cfg.mode, "Permutation mode")->check(CLI::IsMember({"restandardize", "raw"}));
    test->add_option("--cutoff", cfg.cutoff, "FDR cutoff used for the significance count");
    test->add_option("--sign", cfg.sign, "Sign echo for downstream graphs")
        ->check(CLI::IsMember({"positive", "negative", "both"}));
    test->add_option("--nuisance", cfg.nuisance, "Comma-separated nuisance columns regressed out within class")
        ->delimiter(',');
    test->add_option("--max-rank", cfg.max_rank, "Ranks written to the FDR report (0 = all pairs)");
    test->add_flag("--monotone", cfg.monotone, "Report the running maximum of the FDR curve");
    test->add_flag("--dump-null", cfg.dump_null, "Also write the null pool as null_pool.bin");

    auto* baseline = app.add_subcommand("baseline", "Pairwise logistic interaction tests with BH adjustment");
    add_data_options(baseline, cfg);

    auto* simulate = app.add_subcommand("simulate", "Block-equicorrelated two-class simulation experiment");
    simulate->add_option("--config", cfg.config, "key = value experiment config")->check(CLI::ExistingFile);
    simulate->add_option("--seed", cfg.seed, "Override the config seed");
    simulate->add_option("--trials", cfg.trials, "Override the number of trials");
    simulate->add_option("--threads", cfg.threads, "Worker threads (0 = runtime default)");
    simulate->add_option("--out", cfg.out_dir, "Output directory");

    auto* graph = app.add_subcommand("graph", "Interaction graph from an FDR report");
    graph->add_option("--fdr-report", cfg.fdr_report, "fdr.tsv written by 'test'")->required();
    graph->add_option("--cutoff", cfg.cutoff, "Keep ranks up to the last one with fdr_hat <= cutoff");
    graph->add_option("--sign", cfg.sign, "Edge sign filter")->check(CLI::IsMember({"positive", "negative", "both"}));
    graph->add_option("--top-per-component", cfg.top_per_component, "Keep the m best edges per component (0 = all)");
    graph->add_option("--graph-format", cfg.graph_format, "Output format")
        ->check(CLI::IsMember({"edge-tsv", "dot", "json"}));
    graph->add_option("--output", cfg.output, "Output file (default stdout)");

    auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest");
    rerun->add_option("--manifest", cfg.manifest, "manifest.txt of an earlier run")->required();
    rerun->add_option("--out", cfg.out_dir, "Output directory")->required();
    rerun->add_option("--threads", cfg.threads, "Worker threads (0 = runtime default)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, log);
        }
        log << "error: " << e.what() << '\n';
        return 2;
    }
    for (auto* sub : {test, baseline, simulate, graph, rerun}) {
        if (sub->parsed()) {
            cfg.subcommand = sub->get_name();
        }
    }
    try {
        return dispatch(cfg, out, log);
    } catch (const ValidationError& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        log << "internal error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace tmicor
