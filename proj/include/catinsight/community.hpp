#pragma once

#include "catinsight/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace catinsight {

using CommunityId = std::uint32_t;

/// Disjoint cover of the node set. Community ids are dense and numbered by
/// first appearance in node order; each member list is ascending.
struct Partition {
    std::vector<CommunityId> assignment;
    std::vector<std::vector<NodeId>> communities;

    std::size_t node_count() const { return assignment.size(); }
    std::size_t community_count() const { return communities.size(); }

    /// Builds a partition from arbitrary labels, renumbering them densely.
    static Partition from_labels(std::span<const std::uint32_t> labels);
    static Partition singletons(std::size_t node_count);
};

/// Weighted Newman modularity. Throws DataError on an edgeless graph.
double modularity(const SimilarityGraph& graph, const Partition& partition);

/// Graph with self-loops, as produced by folding communities into nodes.
/// self_loop[i] sums A_ab over ordered pairs inside node i (twice the
/// folded intra weight); degree[i] includes it. total_degree is 2m.
struct CoarseGraph {
    std::size_t node_count = 0;
    std::vector<std::size_t> offsets{0};
    std::vector<Neighbor> adjacency;
    std::vector<double> self_loop;
    std::vector<double> degree;
    double total_degree = 0.0;

    std::span<const Neighbor> neighbors(NodeId node) const {
        return {adjacency.data() + offsets[node], adjacency.data() + offsets[node + 1]};
    }

    static CoarseGraph from(const SimilarityGraph& graph);
};

/// Folds each community into one node; `community` holds dense ids < count.
CoarseGraph aggregate(const CoarseGraph& graph, std::span<const CommunityId> community,
                      std::size_t count);

double modularity(const CoarseGraph& graph, std::span<const CommunityId> community);

/// One accepted local move, reported after it is applied.
struct LouvainMove {
    std::size_t round = 0;
    std::size_t level = 0;
    NodeId node = 0; // node of the current level graph
    CommunityId from = 0;
    CommunityId to = 0;
    double delta_q = 0.0; // incremental modularity gain of the move
    // original node -> level node, and level node -> community after the move
    std::span<const NodeId> membership;
    std::span<const CommunityId> community;
};

struct LouvainOptions {
    std::function<void(const LouvainMove&)> on_move;
};

/// Louvain modularity optimization with a fixed ascending sweep order and
/// lowest-id tie-breaking. After the coarse levels converge, the result is
/// re-swept at node level and re-folded until no single-node move gains.
/// An edgeless graph yields all singletons.
Partition louvain(const SimilarityGraph& graph, const LouvainOptions& options = {});

struct CommunityStats {
    CommunityId id = 0;
    std::size_t size = 0;
    double strength = 0.0;
    double intra_weight = 0.0;
    double incident_weight = 0.0; // edges with at least one endpoint inside, each counted once
};

std::vector<CommunityStats> community_stats(const SimilarityGraph& graph,
                                            const Partition& partition);

struct SelectionCriteria {
    double min_size_fraction = 0.05;
    std::size_t top_k = 1;

    void validate() const;
};

/// Communities with size >= min_size_fraction of all nodes, strongest first
/// (ties: larger size, then smaller id), truncated to top_k.
std::vector<CommunityId> select_communities(std::span<const CommunityStats> stats,
                                            const SelectionCriteria& criteria);

/// "node_id community_id" per line.
void write_partition(std::ostream& out, const Partition& partition);
Partition read_partition(std::istream& in, std::string_view source);

} // namespace catinsight
