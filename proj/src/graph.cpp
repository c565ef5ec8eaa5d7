#include "catinsight/graph.hpp"

#include "catinsight/error.hpp"
#include "catinsight/format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

namespace catinsight {

namespace {

std::size_t intersection_size(std::span<const ItemId> a, std::span<const ItemId> b) {
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

} // namespace

void GraphConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw ConfigError("epsilon must lie in (0, 1], got " + format_number(epsilon));
    }
    if (workers == 0) {
        throw ConfigError("workers must be at least 1");
    }
}

SimilarityGraph SimilarityGraph::from_edges(std::size_t node_count, std::vector<Edge> edges) {
    for (auto& e : edges) {
        if (e.u == e.v) {
            throw DataError("graph: self-loop on node " + std::to_string(e.u));
        }
        if (e.u >= node_count || e.v >= node_count) {
            throw DataError("graph: edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") has an endpoint outside [0, " + std::to_string(node_count) + ")");
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw DataError("graph: edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") has non-positive weight");
        }
        if (e.u > e.v) {
            std::swap(e.u, e.v);
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) {
            throw DataError("graph: duplicate edge (" + std::to_string(edges[i].u) + ", " +
                            std::to_string(edges[i].v) + ")");
        }
    }

    SimilarityGraph g;
    g.node_count_ = node_count;
    g.edges_ = std::move(edges);

    std::vector<std::size_t> counts(node_count + 1, 0);
    for (const auto& e : g.edges_) {
        ++counts[e.u + 1];
        ++counts[e.v + 1];
    }
    g.offsets_.assign(node_count + 1, 0);
    for (std::size_t i = 0; i < node_count; ++i) {
        g.offsets_[i + 1] = g.offsets_[i] + counts[i + 1];
    }
    g.adjacency_.resize(g.offsets_[node_count]);
    g.degree_.assign(node_count, 0.0);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    // Edges are sorted by (u, v): lower neighbors are written first, then
    // higher ones, so every neighbor list comes out sorted.
    for (const auto& e : g.edges_) {
        g.adjacency_[cursor[e.v]++] = Neighbor{e.u, e.weight};
    }
    for (const auto& e : g.edges_) {
        g.adjacency_[cursor[e.u]++] = Neighbor{e.v, e.weight};
    }
    for (NodeId node = 0; node < node_count; ++node) {
        auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[node]);
        auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[node + 1]);
        double degree = 0.0;
        for (auto it = first; it != last; ++it) {
            degree += it->weight;
        }
        g.degree_[node] = degree;
    }
    double total = 0.0;
    for (const auto& e : g.edges_) {
        total += e.weight;
    }
    g.total_weight_ = total;
    return g;
}

double cosine_similarity(std::span<const ItemId> a, std::span<const ItemId> b) {
    if (a.empty() || b.empty()) {
        throw DataError("cosine similarity is undefined for an empty transaction");
    }
    const auto shared = static_cast<double>(intersection_size(a, b));
    return shared / std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double cosine_similarity(const Transaction& a, const Transaction& b) {
    return cosine_similarity(std::span<const ItemId>(a.items), std::span<const ItemId>(b.items));
}

SimilarityGraph build_graph(std::span<const Transaction> transactions, const GraphConfig& config) {
    config.validate();
    const std::size_t n = transactions.size();

    // Flatten into one contiguous item array for locality in the pair loop.
    std::vector<std::size_t> offsets(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        offsets[i + 1] = offsets[i] + transactions[i].items.size();
    }
    std::vector<ItemId> items;
    items.reserve(offsets[n]);
    for (const auto& t : transactions) {
        items.insert(items.end(), t.items.begin(), t.items.end());
    }
    auto row = [&](std::size_t i) {
        return std::span<const ItemId>(items.data() + offsets[i], items.data() + offsets[i + 1]);
    };

    const std::size_t workers = std::min(config.workers, std::max<std::size_t>(n, 1));
    std::vector<std::vector<Edge>> local(workers);

    // Rows are dealt round-robin so the triangular workload stays balanced.
    // Rows without items (all cells missing) stay isolated.
    auto scan = [&](std::size_t worker) {
        auto& out = local[worker];
        for (std::size_t u = worker; u < n; u += workers) {
            const auto a = row(u);
            if (a.empty()) {
                continue;
            }
            for (std::size_t v = u + 1; v < n; ++v) {
                const auto b = row(v);
                if (b.empty()) {
                    continue;
                }
                const double w = cosine_similarity(a, b);
                if (w > config.epsilon) {
                    out.push_back(Edge{static_cast<NodeId>(u), static_cast<NodeId>(v), w});
                }
            }
        }
    };

    if (workers == 1) {
        scan(0);
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back(scan, w);
        }
    }

    std::vector<Edge> edges;
    if (workers == 1) {
        edges = std::move(local[0]);
    } else {
        std::size_t total = 0;
        for (const auto& part : local) {
            total += part.size();
        }
        edges.reserve(total);
        for (auto& part : local) {
            edges.insert(edges.end(), part.begin(), part.end());
            std::vector<Edge>().swap(part);
        }
    }
    return SimilarityGraph::from_edges(n, std::move(edges));
}

void write_edge_list(std::ostream& out, const SimilarityGraph& graph) {
    out << "# nodes " << graph.node_count() << '\n';
    for (const auto& e : graph.edges()) {
        out << e.u << ' ' << e.v << ' ' << format_number(e.weight) << '\n';
    }
}

SimilarityGraph read_edge_list(std::istream& in, std::string_view source) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> nodes;
    std::vector<Edge> edges;
    const std::string where(source);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            constexpr std::string_view tag = "# nodes ";
            if (std::string_view(line).substr(0, tag.size()) == tag) {
                nodes = static_cast<std::size_t>(
                    parse_integer(std::string_view(line).substr(tag.size()), where));
            }
            continue;
        }
        const auto first = line.find(' ');
        const auto second = first == std::string::npos ? first : line.find(' ', first + 1);
        if (second == std::string::npos) {
            throw DataError(where + ": line " + std::to_string(line_no) +
                            ": expected 'u v weight'");
        }
        const std::string_view view(line);
        const auto what = where + ": line " + std::to_string(line_no);
        const auto u = parse_integer(view.substr(0, first), what);
        const auto v = parse_integer(view.substr(first + 1, second - first - 1), what);
        const double w = parse_number(view.substr(second + 1), what);
        if (u < 0 || v < 0) {
            throw DataError(what + ": negative node id");
        }
        edges.push_back(Edge{static_cast<NodeId>(u), static_cast<NodeId>(v), w});
    }
    if (!nodes) {
        throw DataError(where + ": missing '# nodes N' header line");
    }
    return SimilarityGraph::from_edges(*nodes, std::move(edges));
}

} // namespace catinsight
