#ifndef TMICOR_GRAPH_HPP
#define TMICOR_GRAPH_HPP

#include "tmicor/correlation.hpp"
#include "tmicor/fdr.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace tmicor {

/// T > 0: class-1 correlation exceeds class-2 correlation.
enum class SignFilter { positive, negative, both };

enum class GraphFormat { edge_tsv, dot, json };

/// One ranked pair with its FDR estimate, independent of feature indices.
struct RankedPair {
    std::size_t rank = 0;
    std::string feature_j;
    std::string feature_k;
    double t = 0;
    double fdr_hat = 0;
};

std::vector<RankedPair> ranked_pairs(const std::vector<PairStatistic>& stats, const FdrCurve& curve,
                                     const std::vector<std::string>& names);
std::vector<RankedPair> ranked_pairs(const std::vector<FdrReportRow>& rows);

/// Undirected edge; `source` < `target` lexicographically.
struct GraphEdge {
    std::string source;
    std::string target;
    double t = 0;
    std::size_t rank = 0;
    double fdr_hat = 0;
};

/**
 * @brief Significant interactions as an undirected graph.
 *
 * Nodes are exactly the endpoints of edges. Nodes, edges (by endpoint names)
 * and components (by their smallest name) are kept in lexicographic order.
 */
struct InteractionGraph {
    std::vector<std::string> nodes;
    std::vector<GraphEdge> edges;
    std::vector<std::vector<std::string>> components;
};

/// Minimal disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n);
    std::size_t find(std::size_t x);
    bool unite(std::size_t a, std::size_t b);

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// Canonicalizes edge orientation and order, derives nodes and components.
InteractionGraph make_graph(std::vector<GraphEdge> edges);

/**
 * Keeps ranks 1..L*, L* being the largest rank with fdr_hat <= cutoff, then
 * applies the sign filter. Throws `ValidationError` unless 0 < cutoff <= 1.
 */
InteractionGraph build_graph(const std::vector<RankedPair>& ranked, double cutoff, SignFilter sign);

/// Within each component keeps the `m` smallest-rank edges, then rebuilds the graph.
InteractionGraph top_edges_per_component(const InteractionGraph& g, std::size_t m);

void emit(std::ostream& out, const InteractionGraph& g, GraphFormat format);

/// Reads the JSON written by `emit`; components are recomputed from the edges.
InteractionGraph parse_graph_json(std::istream& in);

SignFilter parse_sign(const std::string& s);
GraphFormat parse_graph_format(const std::string& s);

} // namespace tmicor

#endif
