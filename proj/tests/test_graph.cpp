#include "oracles.hpp"

#include "tmicor/errors.hpp"
#include "tmicor/graph.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace tmicor;

namespace {

RankedPair rp(std::size_t rank, std::string a, std::string b, double t, double fdr) {
    return {rank, std::move(a), std::move(b), t, fdr};
}

std::string render(const InteractionGraph& g, GraphFormat f) {
    std::ostringstream out;
    emit(out, g, f);
    return out.str();
}

// Components by repeated graph search over an adjacency map.
std::set<std::set<std::string>> bfs_components(const InteractionGraph& g) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : g.edges) {
        adj[e.source].push_back(e.target);
        adj[e.target].push_back(e.source);
    }
    std::set<std::string> seen;
    std::set<std::set<std::string>> out;
    for (const auto& [start, _] : adj) {
        if (seen.count(start)) {
            continue;
        }
        std::set<std::string> comp;
        std::vector<std::string> stack{start};
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            if (!seen.insert(v).second) {
                continue;
            }
            comp.insert(v);
            for (const auto& w : adj[v]) {
                stack.push_back(w);
            }
        }
        out.insert(comp);
    }
    return out;
}

} // namespace

TEST_CASE("sign filter") {
    const std::vector<RankedPair> r{rp(1, "a", "b", 0.4, 0.01), rp(2, "c", "d", -0.3, 0.02), rp(3, "e", "f", 0.2, 0.03)};
    CHECK(build_graph(r, 0.1, SignFilter::positive).edges.size() == 2);
    CHECK(build_graph(r, 0.1, SignFilter::negative).edges.size() == 1);
    CHECK(build_graph(r, 0.1, SignFilter::both).edges.size() == 3);
}

TEST_CASE("cutoff selects the prefix up to the last qualifying rank") {
    const std::vector<RankedPair> r{rp(1, "a", "b", 0.4, 0.05), rp(2, "c", "d", -0.3, 0.12), rp(3, "e", "f", 0.2, 0.09),
                                    rp(4, "g", "h", 0.1, 0.3)};
    CHECK(build_graph(r, 0.1, SignFilter::both).edges.size() == 3);
    CHECK(build_graph(r, 0.01, SignFilter::both).edges.empty());
    CHECK_THROWS_AS(build_graph(r, 0.0, SignFilter::both), ValidationError);
    CHECK_THROWS_AS(build_graph(r, 1.5, SignFilter::both), ValidationError);
}

TEST_CASE("chain plus isolated pair gives two components") {
    const std::vector<RankedPair> r{rp(1, "n3", "n2", 0.5, 0.01), rp(2, "n1", "n2", 0.4, 0.01), rp(3, "x", "y", 0.3, 0.01),
                                    rp(4, "n4", "n3", -0.3, 0.02), rp(5, "n5", "n4", 0.2, 0.02)};
    const auto g = build_graph(r, 0.1, SignFilter::both);
    REQUIRE(g.components.size() == 2);
    CHECK(g.components[0] == std::vector<std::string>{"n1", "n2", "n3", "n4", "n5"});
    CHECK(g.components[1] == std::vector<std::string>{"x", "y"});
    for (const auto& e : g.edges) {
        CHECK(e.source < e.target);
    }
}

TEST_CASE("union-find components agree with graph search on random graphs") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 20; ++rep) {
        std::uniform_int_distribution<int> node(0, 29);
        std::vector<RankedPair> r;
        for (std::size_t i = 1; i <= 25; ++i) {
            int a = node(rng), b = node(rng);
            if (a == b) {
                continue;
            }
            r.push_back(rp(i, "v" + std::to_string(a), "v" + std::to_string(b), 0.1, 0.01));
        }
        const auto g = build_graph(r, 0.1, SignFilter::both);
        std::set<std::set<std::string>> ours;
        for (const auto& c : g.components) {
            ours.insert(std::set<std::string>(c.begin(), c.end()));
        }
        CHECK(ours == bfs_components(g));
    }
}

TEST_CASE("top edges per component") {
    const std::vector<RankedPair> r{rp(1, "a", "b", 0.5, 0.01), rp(2, "x", "y", 0.4, 0.01), rp(3, "b", "c", 0.3, 0.01),
                                    rp(4, "c", "d", 0.2, 0.01)};
    const auto g = build_graph(r, 0.1, SignFilter::both);
    const auto same = top_edges_per_component(g, 10);
    CHECK(render(same, GraphFormat::edge_tsv) == render(g, GraphFormat::edge_tsv));
    const auto one = top_edges_per_component(g, 1);
    REQUIRE(one.edges.size() == 2);
    std::set<std::size_t> ranks{one.edges[0].rank, one.edges[1].rank};
    CHECK(ranks == std::set<std::size_t>{1, 2});
    CHECK_THROWS_AS(top_edges_per_component(g, 0), ValidationError);

    // A star with 400 edges around one hub, ranks shuffled.
    std::vector<std::size_t> ranks400(400);
    std::iota(ranks400.begin(), ranks400.end(), std::size_t{1});
    std::shuffle(ranks400.begin(), ranks400.end(), std::mt19937_64(3));
    std::vector<RankedPair> star;
    for (std::size_t i = 0; i < 400; ++i) {
        star.push_back(rp(ranks400[i], "hub", "leaf" + std::to_string(i), 0.1, 0.01));
    }
    const auto big = build_graph(star, 0.1, SignFilter::both);
    const auto top = top_edges_per_component(big, 50);
    CHECK(top.edges.size() == 50);
    std::size_t max_kept = 0;
    for (const auto& e : top.edges) {
        max_kept = std::max(max_kept, e.rank);
    }
    CHECK(max_kept == 50);
}

TEST_CASE("empty graph renders as valid empty documents") {
    const auto g = build_graph({}, 0.1, SignFilter::both);
    CHECK(render(g, GraphFormat::edge_tsv) == "feature_j\tfeature_k\tt\trank\tfdr_hat\n");
    CHECK(render(g, GraphFormat::dot) == "graph interactions {\n}\n");
    std::istringstream in(render(g, GraphFormat::json));
    const auto back = parse_graph_json(in);
    CHECK(back.nodes.empty());
    CHECK(back.edges.empty());
}

TEST_CASE("two-edge graph matches golden files") {
    const std::vector<RankedPair> r{rp(2, "TP53", "GAPDH", -0.25, 0.05), rp(1, "TP53", "ACTB", 0.42, 0.01)};
    const auto g = build_graph(r, 0.1, SignFilter::both);
    const std::string dir = TMICOR_TEST_DATA_DIR;
    CHECK(render(g, GraphFormat::dot) == oracle::slurp(dir + "/two_edge.dot"));
    CHECK(render(g, GraphFormat::edge_tsv) == oracle::slurp(dir + "/two_edge.tsv"));
}

TEST_CASE("json round trip is the identity") {
    const std::vector<RankedPair> r{rp(1, "a", "b", 0.5, 0.01), rp(2, "x", "y", -0.4, 0.02), rp(3, "b", "c", 0.123456789, 0.03)};
    const auto g = build_graph(r, 0.1, SignFilter::both);
    const auto first = render(g, GraphFormat::json);
    std::istringstream in(first);
    CHECK(render(parse_graph_json(in), GraphFormat::json) == first);
    std::istringstream bad("{\"nodes\": []}");
    CHECK_THROWS_AS(parse_graph_json(bad), ParseError);
}

TEST_CASE("option parsing") {
    CHECK(parse_sign("negative") == SignFilter::negative);
    CHECK_THROWS_AS(parse_sign("up"), ValidationError);
    CHECK(parse_graph_format("dot") == GraphFormat::dot);
    CHECK_THROWS_AS(parse_graph_format("gml"), ValidationError);
}
