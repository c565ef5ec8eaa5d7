#pragma once

#include "catinsight/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace catinsight {

using NodeId = std::uint32_t;

struct GraphConfig {
    double epsilon = 0.5; // edges need similarity strictly above this, 0 < epsilon <= 1
    std::size_t workers = 1;

    void validate() const;
};

struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    double weight = 0.0;

    bool operator==(const Edge&) const = default;
};

struct Neighbor {
    NodeId node;
    double weight;
};

/// Undirected weighted graph without self-loops. Edges are kept canonical
/// (u < v, sorted by (u, v)); a CSR adjacency gives per-node neighbor views.
class SimilarityGraph {
public:
    SimilarityGraph() = default;

    /// Validates and canonicalizes an edge list. Rejects self-loops,
    /// duplicate pairs, out-of-range endpoints and non-positive weights.
    static SimilarityGraph from_edges(std::size_t node_count, std::vector<Edge> edges);

    std::size_t node_count() const { return node_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    double total_weight() const { return total_weight_; }

    std::span<const Neighbor> neighbors(NodeId node) const {
        return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
    }
    double degree(NodeId node) const { return degree_[node]; }

private:
    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Neighbor> adjacency_;
    std::vector<double> degree_;
    double total_weight_ = 0.0;
};

/// Cosine of the one-hot indicator vectors: |a ∩ b| / sqrt(|a| |b|).
/// Both item lists must be sorted; an empty list throws DataError.
double cosine_similarity(std::span<const ItemId> a, std::span<const ItemId> b);
double cosine_similarity(const Transaction& a, const Transaction& b);

/// Epsilon-ball graph over all transaction pairs (exact, all pairs compared).
/// Output does not depend on config.workers.
SimilarityGraph build_graph(std::span<const Transaction> transactions, const GraphConfig& config);

/// "u v weight" per line, preceded by a "# nodes N" comment line.
void write_edge_list(std::ostream& out, const SimilarityGraph& graph);
SimilarityGraph read_edge_list(std::istream& in, std::string_view source);

} // namespace catinsight
