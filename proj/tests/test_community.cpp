#include "oracles.hpp"

#include "catinsight/community.hpp"
#include "catinsight/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

namespace ci = catinsight;

namespace {

ci::SimilarityGraph to_graph(std::size_t n, const std::vector<oracle::WEdge>& edges) {
    std::vector<ci::Edge> out;
    for (const auto& e : edges) {
        out.push_back(ci::Edge{e.u, e.v, e.w});
    }
    return ci::SimilarityGraph::from_edges(n, std::move(out));
}

std::vector<std::uint32_t> labels(const ci::Partition& p) {
    return {p.assignment.begin(), p.assignment.end()};
}

ci::Partition partition_of(std::vector<std::uint32_t> l) {
    return ci::Partition::from_labels(l);
}

std::vector<oracle::WEdge> two_cliques() {
    std::vector<oracle::WEdge> edges;
    for (std::uint32_t base : {0u, 4u}) {
        for (std::uint32_t i = 0; i < 4; ++i) {
            for (std::uint32_t j = i + 1; j < 4; ++j) {
                edges.push_back({base + i, base + j, 1.0});
            }
        }
    }
    edges.push_back({3, 4, 1.0});
    return edges;
}

} // namespace

TEST_SUITE("community") {

TEST_CASE("Partition::from_labels renumbers by first appearance") {
    const auto p = partition_of({7, 3, 7, 9, 3});
    CHECK(p.assignment == std::vector<ci::CommunityId>{0, 1, 0, 2, 1});
    REQUIRE(p.community_count() == 3);
    CHECK(p.communities[0] == std::vector<ci::NodeId>{0, 2});
    CHECK(p.communities[1] == std::vector<ci::NodeId>{1, 4});
    CHECK(p.communities[2] == std::vector<ci::NodeId>{3});
}

TEST_CASE("modularity agrees with the direct double sum") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 15;
        const auto edges = oracle::random_graph(rng, n, 0.4);
        if (edges.empty()) {
            continue;
        }
        std::vector<std::uint32_t> l(n);
        for (auto& x : l) x = static_cast<std::uint32_t>(rng() % 4);
        const double q = ci::modularity(to_graph(n, edges), partition_of(l));
        CHECK(q == doctest::Approx(oracle::modularity(n, edges, l)).epsilon(1e-12));
        CHECK(q >= -0.5);
        CHECK(q <= 1.0);
    }
}

TEST_CASE("modularity anchors") {
    const std::vector<oracle::WEdge> triangles = {{0, 1, 1}, {1, 2, 1}, {0, 2, 1},
                                                  {3, 4, 1}, {4, 5, 1}, {3, 5, 1}};
    const auto g = to_graph(6, triangles);
    CHECK(ci::modularity(g, partition_of({0, 0, 0, 0, 0, 0})) == 0.0);
    CHECK(ci::modularity(g, partition_of({0, 0, 0, 1, 1, 1})) == doctest::Approx(0.5).epsilon(1e-12));

    // singletons: Q = -sum k_i^2 / (2m)^2
    const auto edges = two_cliques();
    const auto g2 = to_graph(8, edges);
    double sum = 0.0;
    for (ci::NodeId i = 0; i < 8; ++i) sum += g2.degree(i) * g2.degree(i);
    const double two_m = 2.0 * g2.total_weight();
    CHECK(ci::modularity(g2, ci::Partition::singletons(8)) ==
          doctest::Approx(-sum / (two_m * two_m)).epsilon(1e-12));
}

TEST_CASE("modularity preconditions") {
    const auto empty = ci::SimilarityGraph::from_edges(3, {});
    CHECK_THROWS_AS(ci::modularity(empty, ci::Partition::singletons(3)), ci::DataError);
    const auto g = to_graph(3, {{0, 1, 1.0}});
    CHECK_THROWS_AS(ci::modularity(g, ci::Partition::singletons(2)), ci::InvariantError);
}

TEST_CASE("louvain recovers two bridged cliques") {
    const auto edges = two_cliques();
    const auto p = ci::louvain(to_graph(8, edges));
    CHECK(labels(p) == std::vector<std::uint32_t>{0, 0, 0, 0, 1, 1, 1, 1});
    CHECK(oracle::modularity(8, edges, labels(p)) ==
          doctest::Approx(oracle::max_modularity(8, edges)).epsilon(1e-12));
}

TEST_CASE("louvain on a triangle gives one community") {
    const std::vector<oracle::WEdge> triangle = {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
    const auto p = ci::louvain(to_graph(3, triangle));
    CHECK(p.community_count() == 1);
    CHECK(oracle::modularity(3, triangle, labels(p)) ==
          doctest::Approx(oracle::max_modularity(3, triangle)).epsilon(1e-12));
}

TEST_CASE("no community spans two components; isolates stay alone") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        auto left = oracle::random_graph(rng, 6, 0.6);
        auto right = oracle::random_graph(rng, 6, 0.6);
        for (auto& e : right) {
            e.u += 6;
            e.v += 6;
        }
        left.insert(left.end(), right.begin(), right.end());
        if (left.empty()) {
            continue;
        }
        const auto p = ci::louvain(to_graph(13, left)); // node 12 is isolated
        for (const auto& members : p.communities) {
            const bool has_left = members.front() < 6;
            for (auto v : members) {
                CHECK((v < 6) == has_left);
            }
        }
        CHECK(p.communities[p.assignment[12]].size() == 1);
    }
}

TEST_CASE("edgeless graph gives singletons") {
    const auto p = ci::louvain(ci::SimilarityGraph::from_edges(4, {}));
    CHECK(p.community_count() == 4);
}

TEST_CASE("louvain is locally optimal, monotone and deterministic") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 5 + rng() % 40;
        const auto edges = oracle::random_graph(rng, n, 0.12);
        if (edges.empty()) {
            continue;
        }
        const auto g = to_graph(n, edges);
        double last_q = -1.0;
        bool monotone = true;
        ci::LouvainOptions options;
        options.on_move = [&](const ci::LouvainMove& move) {
            std::vector<std::uint32_t> now(n);
            for (std::size_t v = 0; v < n; ++v) now[v] = move.community[move.membership[v]];
            const double q = oracle::modularity(n, edges, now);
            monotone = monotone && q > last_q - 1e-12;
            last_q = q;
        };
        const auto p = ci::louvain(g, options);
        CHECK(monotone);
        CHECK(oracle::locally_optimal(n, edges, labels(p)));
        CHECK(labels(ci::louvain(g)) == labels(p));
    }
}

TEST_CASE("aggregation preserves modularity") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 4 + rng() % 30;
        const auto edges = oracle::random_graph(rng, n, 0.25);
        if (edges.empty()) {
            continue;
        }
        const auto g = to_graph(n, edges);
        const auto p = ci::louvain(g);
        const auto coarse = ci::aggregate(ci::CoarseGraph::from(g), p.assignment, p.community_count());
        std::vector<ci::CommunityId> identity(p.community_count());
        for (std::size_t c = 0; c < identity.size(); ++c) identity[c] = static_cast<ci::CommunityId>(c);
        CHECK(ci::modularity(coarse, identity) ==
              doctest::Approx(ci::modularity(g, p)).epsilon(1e-12));
        CHECK(coarse.total_degree == doctest::Approx(2.0 * g.total_weight()).epsilon(1e-12));

        // and for an arbitrary partition folded twice
        std::vector<std::uint32_t> l(n);
        for (auto& x : l) x = static_cast<std::uint32_t>(rng() % 5);
        const auto q = partition_of(l);
        const auto folded = ci::aggregate(ci::CoarseGraph::from(g), q.assignment, q.community_count());
        std::vector<ci::CommunityId> all_one(q.community_count(), 0);
        const auto once = ci::aggregate(folded, all_one, 1);
        CHECK(ci::modularity(once, std::vector<ci::CommunityId>{0}) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("community_stats anchors and invariants") {
    const std::vector<oracle::WEdge> edges = {{0, 1, 1.25}, {1, 2, 0.75}, {0, 2, 1.0}, {0, 3, 0.5},
                                              {2, 4, 0.5},  {5, 6, 1.0},  {6, 7, 0.25}};
    const auto p = partition_of({0, 0, 0, 1, 1, 2, 2, 2, 3});
    const auto stats = ci::community_stats(to_graph(9, edges), p);
    REQUIRE(stats.size() == 4);
    CHECK(stats[0].intra_weight == 3.0);
    CHECK(stats[0].incident_weight == 4.0);
    CHECK(stats[0].strength == 0.75);
    CHECK(stats[1].strength == 0.0);
    CHECK(stats[1].incident_weight == 1.0);
    CHECK(stats[2].strength == 1.0);
    CHECK(stats[3].strength == 0.0); // isolated node
    CHECK(stats[3].size == 1);

    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + rng() % 30;
        const auto es = oracle::random_graph(rng, n, 0.2);
        if (es.empty()) continue;
        std::vector<std::uint32_t> l(n);
        for (auto& x : l) x = static_cast<std::uint32_t>(rng() % 4);
        const auto part = partition_of(l);
        const auto s = ci::community_stats(to_graph(n, es), part);
        for (const auto& c : s) {
            double intra = 0.0, incident = 0.0;
            for (const auto& e : es) {
                const bool a = part.assignment[e.u] == c.id;
                const bool b = part.assignment[e.v] == c.id;
                intra += (a && b) ? e.w : 0.0;
                incident += (a || b) ? e.w : 0.0;
            }
            CHECK(c.intra_weight == doctest::Approx(intra).epsilon(1e-12));
            CHECK(c.incident_weight == doctest::Approx(incident).epsilon(1e-12));
            CHECK(c.intra_weight <= c.incident_weight);
            CHECK(c.strength >= 0.0);
            CHECK(c.strength <= 1.0);
            CHECK(c.size == part.communities[c.id].size());
        }
    }
}

TEST_CASE("strength is invariant under weight scaling") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + rng() % 30;
        const auto es = oracle::random_graph(rng, n, 0.2);
        if (es.empty()) continue;
        const auto g = to_graph(n, es);
        const auto p = ci::louvain(g);
        const auto base = ci::community_stats(g, p);
        for (double c : {0.5, 3.0, 1024.0}) {
            auto scaled = es;
            for (auto& e : scaled) e.w *= c;
            const auto s = ci::community_stats(to_graph(n, scaled), p);
            for (std::size_t i = 0; i < s.size(); ++i) {
                CHECK(s[i].strength == base[i].strength);
            }
        }
        for (double c : {0.1, 1.0 / 3.0, 12.7}) {
            auto scaled = es;
            for (auto& e : scaled) e.w *= c;
            const auto s = ci::community_stats(to_graph(n, scaled), p);
            for (std::size_t i = 0; i < s.size(); ++i) {
                CHECK(s[i].strength == doctest::Approx(base[i].strength).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("select_communities") {
    std::vector<ci::CommunityStats> stats(2);
    stats[0] = {0, 50, 0.9, 0, 0};
    stats[1] = {1, 500, 0.6, 0, 0};
    // total nodes 1000: pad with small communities summing to 450
    for (ci::CommunityId id = 2; id < 11; ++id) {
        stats.push_back({id, 50, 0.95, 0, 0});
    }
    stats.back().size = 49; // below the floor
    stats.push_back({11, 1, 1.0, 0, 0});
    std::size_t total = 0;
    for (const auto& s : stats) total += s.size;
    REQUIRE(total == 1000);

    std::vector<ci::CommunityStats> pair = {stats[0], stats[1]};
    // floor 5% of 550 nodes is 27.5, both pass, higher strength wins
    CHECK(ci::select_communities(pair, {0.05, 1}) == std::vector<ci::CommunityId>{0});

    const auto picked = ci::select_communities(stats, {0.05, 1});
    CHECK(picked == std::vector<ci::CommunityId>{2});
    const auto all = ci::select_communities(stats, {0.05, 100});
    REQUIRE(all.size() == 10);
    CHECK(all.front() == 2);
    CHECK(all[8] == 0);
    CHECK(all.back() == 1);

    // 50 >= 0.05 * 1000 is inclusive
    std::vector<ci::CommunityStats> boundary = {{0, 50, 0.9, 0, 0}, {1, 950, 0.6, 0, 0}};
    CHECK(ci::select_communities(boundary, {0.05, 1}) == std::vector<ci::CommunityId>{0});

    // ties: larger size, then smaller id
    std::vector<ci::CommunityStats> ties = {{0, 10, 0.5, 0, 0}, {1, 20, 0.5, 0, 0}, {2, 20, 0.5, 0, 0}};
    CHECK(ci::select_communities(ties, {0.0, 3}) == std::vector<ci::CommunityId>{1, 2, 0});

    try {
        ci::select_communities(boundary, {0.99, 1});
        FAIL("expected DataError");
    } catch (const ci::DataError& e) {
        CHECK(std::string(e.what()).find("min_size_fraction") != std::string::npos);
    }
    CHECK_THROWS_AS(ci::SelectionCriteria({1.5, 1}).validate(), ci::ConfigError);
    CHECK_THROWS_AS(ci::SelectionCriteria({0.1, 0}).validate(), ci::ConfigError);
}

TEST_CASE("partition file round trip") {
    const auto p = partition_of({0, 1, 0, 2, 1});
    std::stringstream buffer;
    ci::write_partition(buffer, p);
    CHECK(buffer.str() == "0 0\n1 1\n2 0\n3 2\n4 1\n");
    const auto back = ci::read_partition(buffer, "mem");
    CHECK(back.assignment == p.assignment);
    std::istringstream bad("0 1\n1 0\n");
    CHECK_THROWS_AS(ci::read_partition(bad, "bad"), ci::DataError);
}

}
