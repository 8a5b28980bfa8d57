#include "tmicor/graph.hpp"
#include "tmicor/errors.hpp"
#include "tmicor/table_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

namespace tmicor {

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::vector<RankedPair> ranked_pairs(const std::vector<PairStatistic>& stats, const FdrCurve& curve,
                                     const std::vector<std::string>& names) {
    std::vector<RankedPair> out;
    out.reserve(curve.size());
    for (std::size_t l = 0; l < curve.size(); ++l) {
        const auto& s = stats[curve.pair_index[l]];
        out.push_back({curve.ranks[l], names[s.j], names[s.k], s.t_value, curve.fdr_hat[l]});
    }
    return out;
}

std::vector<RankedPair> ranked_pairs(const std::vector<FdrReportRow>& rows) {
    std::vector<RankedPair> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back({r.rank, r.feature_j, r.feature_k, r.t, r.fdr_hat});
    }
    return out;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) {
        return false;
    }
    if (size_[a] < size_[b]) {
        std::swap(a, b);
    }
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
}

InteractionGraph make_graph(std::vector<GraphEdge> edges) {
    for (auto& e : edges) {
        if (e.target < e.source) {
            std::swap(e.source, e.target);
        }
    }
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::tie(a.source, a.target, a.rank) < std::tie(b.source, b.target, b.rank);
    });

    InteractionGraph g;
    for (const auto& e : edges) {
        g.nodes.push_back(e.source);
        g.nodes.push_back(e.target);
    }
    std::sort(g.nodes.begin(), g.nodes.end());
    g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
    auto index_of = [&](const std::string& name) {
        return static_cast<std::size_t>(std::lower_bound(g.nodes.begin(), g.nodes.end(), name) - g.nodes.begin());
    };

    UnionFind uf(g.nodes.size());
    for (const auto& e : edges) {
        uf.unite(index_of(e.source), index_of(e.target));
    }
    // Nodes are visited in sorted order, so each component is sorted and the
    // components come out ordered by their smallest name.
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto root = uf.find(i);
        auto [it, inserted] = slot.emplace(root, g.components.size());
        if (inserted) {
            g.components.emplace_back();
        }
        g.components[it->second].push_back(g.nodes[i]);
    }
    g.edges = std::move(edges);
    return g;
}

InteractionGraph build_graph(const std::vector<RankedPair>& ranked, double cutoff, SignFilter sign) {
    if (!(cutoff > 0.0 && cutoff <= 1.0)) {
        throw ValidationError("FDR cutoff must be in (0, 1], got " + format_double(cutoff));
    }
    std::vector<const RankedPair*> by_rank;
    for (const auto& r : ranked) {
        by_rank.push_back(&r);
    }
    std::sort(by_rank.begin(), by_rank.end(), [](const RankedPair* a, const RankedPair* b) { return a->rank < b->rank; });

    std::size_t last = 0;
    for (std::size_t i = 0; i < by_rank.size(); ++i) {
        if (by_rank[i]->fdr_hat <= cutoff) {
            last = i + 1;
        }
    }
    std::vector<GraphEdge> edges;
    for (std::size_t i = 0; i < last; ++i) {
        const auto& r = *by_rank[i];
        const bool keep = sign == SignFilter::both || (sign == SignFilter::positive && r.t > 0) ||
                          (sign == SignFilter::negative && r.t < 0);
        if (keep) {
            edges.push_back({r.feature_j, r.feature_k, r.t, r.rank, r.fdr_hat});
        }
    }
    return make_graph(std::move(edges));
}

InteractionGraph top_edges_per_component(const InteractionGraph& g, std::size_t m) {
    if (m < 1) {
        throw ValidationError("edges per component must be at least 1");
    }
    std::map<std::string, std::size_t> component_of;
    for (std::size_t c = 0; c < g.components.size(); ++c) {
        for (const auto& name : g.components[c]) {
            component_of[name] = c;
        }
    }
    std::vector<std::vector<const GraphEdge*>> grouped(g.components.size());
    for (const auto& e : g.edges) {
        grouped[component_of.at(e.source)].push_back(&e);
    }
    std::vector<GraphEdge> kept;
    for (auto& group : grouped) {
        std::stable_sort(group.begin(), group.end(),
                         [](const GraphEdge* a, const GraphEdge* b) { return a->rank < b->rank; });
        for (std::size_t i = 0; i < std::min(m, group.size()); ++i) {
            kept.push_back(*group[i]);
        }
    }
    return make_graph(std::move(kept));
}

void emit(std::ostream& out, const InteractionGraph& g, GraphFormat format) {
    switch (format) {
    case GraphFormat::edge_tsv:
        out << "feature_j\tfeature_k\tt\trank\tfdr_hat\n";
        for (const auto& e : g.edges) {
            out << e.source << '\t' << e.target << '\t' << format_double(e.t) << '\t' << e.rank << '\t'
                << format_double(e.fdr_hat) << '\n';
        }
        break;
    case GraphFormat::dot:
        out << "graph interactions {\n";
        for (const auto& n : g.nodes) {
            out << "  " << dot_quote(n) << ";\n";
        }
        for (const auto& e : g.edges) {
            out << "  " << dot_quote(e.source) << " -- " << dot_quote(e.target) << " [t=\"" << format_double(e.t)
                << "\", rank=\"" << e.rank << "\", fdr_hat=\"" << format_double(e.fdr_hat) << "\"];\n";
        }
        out << "}\n";
        break;
    case GraphFormat::json: {
        nlohmann::json doc;
        doc["nodes"] = g.nodes;
        doc["edges"] = nlohmann::json::array();
        for (const auto& e : g.edges) {
            doc["edges"].push_back(
                {{"source", e.source}, {"target", e.target}, {"t", e.t}, {"rank", e.rank}, {"fdr_hat", e.fdr_hat}});
        }
        doc["components"] = g.components;
        out << doc.dump(2) << '\n';
        break;
    }
    }
    if (!out) {
        throw IoError("failed writing graph");
    }
}

InteractionGraph parse_graph_json(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
        std::vector<GraphEdge> edges;
        for (const auto& e : doc.at("edges")) {
            edges.push_back({e.at("source").get<std::string>(), e.at("target").get<std::string>(),
                             e.at("t").get<double>(), e.at("rank").get<std::size_t>(), e.at("fdr_hat").get<double>()});
        }
        return make_graph(std::move(edges));
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("invalid graph JSON: ") + ex.what());
    }
}

SignFilter parse_sign(const std::string& s) {
    if (s == "positive") {
        return SignFilter::positive;
    }
    if (s == "negative") {
        return SignFilter::negative;
    }
    if (s == "both") {
        return SignFilter::both;
    }
    throw ValidationError("sign must be positive, negative or both, got '" + s + "'");
}

GraphFormat parse_graph_format(const std::string& s) {
    if (s == "edge-tsv") {
        return GraphFormat::edge_tsv;
    }
    if (s == "dot") {
        return GraphFormat::dot;
    }
    if (s == "json") {
        return GraphFormat::json;
    }
    throw ValidationError("graph format must be edge-tsv, dot or json, got '" + s + "'");
}

} // namespace tmicor
