#include "catinsight/community.hpp"

#include "catinsight/error.hpp"
#include "catinsight/format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace catinsight {

namespace {

// Smallest modularity gain treated as an improvement.
constexpr double kMinGain = 1e-12;

// Renumbers labels by first appearance; returns the number of communities.
std::size_t renumber(std::span<CommunityId> labels) {
    std::vector<CommunityId> remap(labels.size(), std::numeric_limits<CommunityId>::max());
    CommunityId next = 0;
    for (auto& label : labels) {
        if (label >= remap.size()) {
            remap.resize(label + 1, std::numeric_limits<CommunityId>::max());
        }
        if (remap[label] == std::numeric_limits<CommunityId>::max()) {
            remap[label] = next++;
        }
        label = remap[label];
    }
    return next;
}

class LocalMover {
public:
    LocalMover(const CoarseGraph& graph, std::vector<CommunityId>& community)
        : graph_(graph), community_(community), total_(graph.node_count, 0.0),
          link_(graph.node_count, 0.0), seen_(graph.node_count, false) {
        for (NodeId i = 0; i < graph.node_count; ++i) {
            total_[community[i]] += graph.degree[i];
        }
    }

    // Sweeps nodes in ascending order until a sweep moves nothing.
    template <typename OnMove>
    std::size_t run(OnMove&& on_move) {
        const double m2 = graph_.total_degree;
        std::size_t moves = 0;
        while (true) {
            std::size_t moved = 0;
            for (NodeId i = 0; i < graph_.node_count; ++i) {
                const double ki = graph_.degree[i];
                const CommunityId old = community_[i];
                for (const auto& nb : graph_.neighbors(i)) {
                    const CommunityId c = community_[nb.node];
                    if (!seen_[c]) {
                        seen_[c] = true;
                        touched_.push_back(c);
                    }
                    link_[c] += nb.weight;
                }
                std::sort(touched_.begin(), touched_.end());

                // gain(c) = k_i,c - tot_c * k_i / 2m, i.e. ΔQ of inserting the
                // isolated node into c, scaled by 2m / 2.
                const double stay = link_[old] - (total_[old] - ki) * ki / m2;
                CommunityId best = old;
                double best_gain = stay;
                for (const CommunityId c : touched_) {
                    if (c == old) {
                        continue;
                    }
                    const double gain = link_[c] - total_[c] * ki / m2;
                    if (gain > best_gain) {
                        best = c;
                        best_gain = gain;
                    }
                }
                const double delta_q = 2.0 * (best_gain - stay) / m2;
                for (const CommunityId c : touched_) {
                    link_[c] = 0.0;
                    seen_[c] = false;
                }
                touched_.clear();

                if (best != old && delta_q > kMinGain) {
                    total_[old] -= ki;
                    total_[best] += ki;
                    community_[i] = best;
                    ++moved;
                    on_move(i, old, best, delta_q);
                }
            }
            moves += moved;
            if (moved == 0) {
                return moves;
            }
        }
    }

private:
    const CoarseGraph& graph_;
    std::vector<CommunityId>& community_;
    std::vector<double> total_;
    std::vector<double> link_;
    std::vector<bool> seen_;
    std::vector<CommunityId> touched_;
};

} // namespace

Partition Partition::from_labels(std::span<const std::uint32_t> labels) {
    Partition p;
    p.assignment.assign(labels.begin(), labels.end());
    const auto count = renumber(p.assignment);
    p.communities.resize(count);
    for (NodeId node = 0; node < p.assignment.size(); ++node) {
        p.communities[p.assignment[node]].push_back(node);
    }
    return p;
}

Partition Partition::singletons(std::size_t node_count) {
    std::vector<std::uint32_t> labels(node_count);
    std::iota(labels.begin(), labels.end(), 0u);
    return from_labels(labels);
}

double modularity(const SimilarityGraph& graph, const Partition& partition) {
    if (partition.node_count() != graph.node_count()) {
        throw InvariantError("modularity: partition covers " +
                             std::to_string(partition.node_count()) + " nodes, graph has " +
                             std::to_string(graph.node_count()));
    }
    if (graph.edge_count() == 0) {
        throw DataError("modularity is undefined for a graph without edges");
    }
    const double m2 = 2.0 * graph.total_weight();
    std::vector<double> intra(partition.community_count(), 0.0);
    std::vector<double> total(partition.community_count(), 0.0);
    for (const auto& e : graph.edges()) {
        const auto cu = partition.assignment[e.u];
        if (cu == partition.assignment[e.v]) {
            intra[cu] += 2.0 * e.weight;
        }
    }
    for (NodeId node = 0; node < graph.node_count(); ++node) {
        total[partition.assignment[node]] += graph.degree(node);
    }
    double q = 0.0;
    for (std::size_t c = 0; c < intra.size(); ++c) {
        q += intra[c] / m2 - (total[c] / m2) * (total[c] / m2);
    }
    return q;
}

CoarseGraph CoarseGraph::from(const SimilarityGraph& graph) {
    CoarseGraph g;
    g.node_count = graph.node_count();
    g.offsets.assign(g.node_count + 1, 0);
    g.self_loop.assign(g.node_count, 0.0);
    g.degree.assign(g.node_count, 0.0);
    g.adjacency.reserve(2 * graph.edge_count());
    for (NodeId node = 0; node < g.node_count; ++node) {
        const auto nbs = graph.neighbors(node);
        g.adjacency.insert(g.adjacency.end(), nbs.begin(), nbs.end());
        g.offsets[node + 1] = g.adjacency.size();
        g.degree[node] = graph.degree(node);
    }
    g.total_degree = 2.0 * graph.total_weight();
    return g;
}

CoarseGraph aggregate(const CoarseGraph& graph, std::span<const CommunityId> community,
                      std::size_t count) {
    std::vector<std::vector<NodeId>> members(count);
    for (NodeId node = 0; node < graph.node_count; ++node) {
        members.at(community[node]).push_back(node);
    }

    CoarseGraph g;
    g.node_count = count;
    g.offsets.assign(count + 1, 0);
    g.self_loop.assign(count, 0.0);
    g.degree.assign(count, 0.0);
    g.total_degree = graph.total_degree;

    std::vector<double> link(count, 0.0);
    std::vector<bool> seen(count, false);
    std::vector<CommunityId> touched;
    for (CommunityId c = 0; c < count; ++c) {
        double self = 0.0;
        double degree = 0.0;
        for (const NodeId node : members[c]) {
            self += graph.self_loop[node];
            degree += graph.degree[node];
            for (const auto& nb : graph.neighbors(node)) {
                const CommunityId d = community[nb.node];
                if (d == c) {
                    self += nb.weight;
                    continue;
                }
                if (!seen[d]) {
                    seen[d] = true;
                    touched.push_back(d);
                }
                link[d] += nb.weight;
            }
        }
        std::sort(touched.begin(), touched.end());
        for (const CommunityId d : touched) {
            g.adjacency.push_back(Neighbor{d, link[d]});
            link[d] = 0.0;
            seen[d] = false;
        }
        touched.clear();
        g.self_loop[c] = self;
        g.degree[c] = degree;
        g.offsets[c + 1] = g.adjacency.size();
    }
    return g;
}

double modularity(const CoarseGraph& graph, std::span<const CommunityId> community) {
    if (!(graph.total_degree > 0.0)) {
        throw DataError("modularity is undefined for a graph without edges");
    }
    const auto count = community.empty()
                           ? std::size_t{0}
                           : static_cast<std::size_t>(
                                 *std::max_element(community.begin(), community.end())) + 1;
    std::vector<double> inside(count, 0.0);
    std::vector<double> total(count, 0.0);
    for (NodeId node = 0; node < graph.node_count; ++node) {
        const auto c = community[node];
        inside[c] += graph.self_loop[node];
        total[c] += graph.degree[node];
        for (const auto& nb : graph.neighbors(node)) {
            if (community[nb.node] == c) {
                inside[c] += nb.weight;
            }
        }
    }
    const double m2 = graph.total_degree;
    double q = 0.0;
    for (std::size_t c = 0; c < count; ++c) {
        q += inside[c] / m2 - (total[c] / m2) * (total[c] / m2);
    }
    return q;
}

Partition louvain(const SimilarityGraph& graph, const LouvainOptions& options) {
    const std::size_t n = graph.node_count();
    if (graph.edge_count() == 0) {
        return Partition::singletons(n);
    }

    const CoarseGraph fine = CoarseGraph::from(graph);
    std::vector<NodeId> identity(n);
    std::iota(identity.begin(), identity.end(), 0u);
    std::vector<CommunityId> assignment(identity.begin(), identity.end());

    for (std::size_t round = 0;; ++round) {
        // Node-level sweep, starting from the current assignment.
        std::vector<CommunityId> community = assignment;
        std::vector<NodeId> membership = identity;
        std::size_t level = 0;
        auto report = [&](NodeId node, CommunityId from, CommunityId to, double delta_q) {
            if (options.on_move) {
                options.on_move(
                    LouvainMove{round, level, node, from, to, delta_q, membership, community});
            }
        };

        LocalMover mover(fine, community);
        const std::size_t fine_moves = mover.run(report);
        if (fine_moves == 0 && round > 0) {
            break;
        }
        std::size_t count = renumber(community);
        assignment = community;
        if (fine_moves == 0) {
            break;
        }

        // Fold and repeat on the coarse graphs until a level makes no move.
        CoarseGraph current = aggregate(fine, community, count);
        membership.assign(assignment.begin(), assignment.end());
        while (true) {
            ++level;
            community.resize(current.node_count);
            std::iota(community.begin(), community.end(), 0u);
            LocalMover coarse(current, community);
            if (coarse.run(report) == 0) {
                break;
            }
            count = renumber(community);
            for (auto& m : membership) {
                m = community[m];
            }
            current = aggregate(current, community, count);
        }
        assignment.assign(membership.begin(), membership.end());
    }
    return Partition::from_labels(assignment);
}

std::vector<CommunityStats> community_stats(const SimilarityGraph& graph,
                                            const Partition& partition) {
    if (partition.node_count() != graph.node_count()) {
        throw InvariantError("community_stats: partition does not match the graph");
    }
    std::vector<CommunityStats> stats(partition.community_count());
    for (CommunityId c = 0; c < stats.size(); ++c) {
        stats[c].id = c;
        stats[c].size = partition.communities[c].size();
    }
    for (const auto& e : graph.edges()) {
        const auto cu = partition.assignment[e.u];
        const auto cv = partition.assignment[e.v];
        stats[cu].incident_weight += e.weight;
        if (cu == cv) {
            stats[cu].intra_weight += e.weight;
        } else {
            stats[cv].incident_weight += e.weight;
        }
    }
    for (auto& s : stats) {
        s.strength = s.incident_weight > 0.0 ? s.intra_weight / s.incident_weight : 0.0;
    }
    return stats;
}

void SelectionCriteria::validate() const {
    if (!(min_size_fraction >= 0.0 && min_size_fraction <= 1.0)) {
        throw ConfigError("min_size_fraction must lie in [0, 1], got " +
                          format_number(min_size_fraction));
    }
    if (top_k < 1) {
        throw ConfigError("top_k must be at least 1");
    }
}

std::vector<CommunityId> select_communities(std::span<const CommunityStats> stats,
                                            const SelectionCriteria& criteria) {
    criteria.validate();
    if (stats.empty()) {
        throw InvariantError("select_communities: no communities given");
    }
    std::size_t total = 0;
    for (const auto& s : stats) {
        total += s.size;
    }
    // Inclusive floor: size >= fraction * total, evaluated without rounding drift.
    auto passes = [&](std::size_t size) {
        return static_cast<double>(size) >=
               criteria.min_size_fraction * static_cast<double>(total) * (1.0 - 1e-12);
    };

    std::vector<const CommunityStats*> passing;
    for (const auto& s : stats) {
        if (passes(s.size)) {
            passing.push_back(&s);
        }
    }
    if (passing.empty()) {
        throw DataError("no community reaches min_size_fraction " +
                        format_number(criteria.min_size_fraction) + " of " +
                        std::to_string(total) + " nodes; lower min_size_fraction");
    }
    std::sort(passing.begin(), passing.end(), [](const CommunityStats* a, const CommunityStats* b) {
        if (a->strength != b->strength) {
            return a->strength > b->strength;
        }
        if (a->size != b->size) {
            return a->size > b->size;
        }
        return a->id < b->id;
    });
    std::vector<CommunityId> selected;
    for (std::size_t i = 0; i < passing.size() && i < criteria.top_k; ++i) {
        selected.push_back(passing[i]->id);
    }
    return selected;
}

void write_partition(std::ostream& out, const Partition& partition) {
    for (NodeId node = 0; node < partition.node_count(); ++node) {
        out << node << ' ' << partition.assignment[node] << '\n';
    }
}

Partition read_partition(std::istream& in, std::string_view source) {
    const std::string where(source);
    std::vector<std::uint32_t> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto space = line.find(' ');
        const auto what = where + ": line " + std::to_string(line_no);
        if (space == std::string::npos) {
            throw DataError(what + ": expected 'node_id community_id'");
        }
        const std::string_view view(line);
        const auto node = parse_integer(view.substr(0, space), what);
        const auto community = parse_integer(view.substr(space + 1), what);
        if (node != static_cast<long long>(labels.size()) || community < 0) {
            throw DataError(what + ": node ids must be consecutive from 0");
        }
        labels.push_back(static_cast<std::uint32_t>(community));
    }
    auto partition = Partition::from_labels(labels);
    if (partition.assignment != labels) {
        throw DataError(where + ": community ids are not in canonical first-appearance order");
    }
    return partition;
}

} // namespace catinsight
