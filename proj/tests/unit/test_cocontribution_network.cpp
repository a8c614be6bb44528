#include "osmscale/cocontribution_network.hpp"
#include "osmscale/errors.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace osmscale;

namespace {

struct Contribution
{
    UserId user;
    Timestamp when;
};

ElementHistory element(ElementId id, std::vector<Contribution> cs)
{
    ElementHistory h{{ElementType::node, id}, {}};
    Version v = 1;
    for (const auto& c : cs) {
        RawVersion r;
        r.element_id = id;
        r.version = v++;
        r.user_id = c.user;
        r.timestamp = c.when;
        r.payload = NodePayload{Coordinate{}};
        h.versions.push_back(r);
    }
    return h;
}

ElementHistory element(ElementId id, std::vector<UserId> users)
{
    std::vector<Contribution> cs;
    for (auto u : users)
        cs.push_back({u, make_timestamp(2010, 1, 1)});
    return element(id, cs);
}

std::set<std::pair<UserId, UserId>> edge_set(const CoContributionGraph& g)
{
    std::set<std::pair<UserId, UserId>> out;
    for (const auto& e : g.edges())
        out.emplace(e.a, e.b);
    return out;
}

CoContributionGraph graph_of(std::vector<std::vector<UserId>> sets)
{
    GraphBuilder b;
    for (const auto& s : sets) {
        std::vector<UserId> u(s);
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        b.add(u);
    }
    return b.build();
}

} // namespace

TEST(ContributorSets, Examples)
{
    EXPECT_EQ(contributor_set(element(1, std::vector<UserId>{1, 3, 4})).users, (std::vector<UserId>{1, 3, 4}));
    EXPECT_EQ(contributor_set(element(1, std::vector<UserId>{7, 7})).users, (std::vector<UserId>{7}));
    EXPECT_TRUE(contributor_set(element(1, std::vector<UserId>{0, 0})).users.empty());

    const auto h = element(2, {{1, make_timestamp(2007, 3, 1)}, {2, make_timestamp(2008, 3, 1)}});
    EXPECT_EQ(contributor_set(h, end_of_year(2007)).users, (std::vector<UserId>{1}));
    EXPECT_EQ(contributor_set(h).users, (std::vector<UserId>{1, 2}));
}

TEST(BuildGraph, FigureFiveElement)
{
    const auto g = graph_of({{1, 3, 4}});
    EXPECT_EQ(edge_set(g), (std::set<std::pair<UserId, UserId>>{{1, 3}, {1, 4}, {3, 4}}));
    EXPECT_EQ(g.node_count(), 3u);
}

TEST(BuildGraph, SoloElementsGiveNoEdges)
{
    const auto g = graph_of({{1}, {2}, {3}});
    EXPECT_EQ(g.edge_count(), 0u);
    EXPECT_TRUE(g.empty());
}

TEST(BuildGraph, ChainDegrees)
{
    const auto g = graph_of({{1, 2}, {2, 3}});
    EXPECT_EQ(edge_set(g), (std::set<std::pair<UserId, UserId>>{{1, 2}, {2, 3}}));
    EXPECT_EQ(g.degree(2), 2u);
    EXPECT_EQ(g.degree(1), 1u);
    EXPECT_EQ(g.degree(99), 0u);
    EXPECT_TRUE(g.contains(3));
    EXPECT_FALSE(g.contains(4));
}

TEST(BuildGraph, FromEdgesDropsSelfLoopsAndAnonymous)
{
    const auto g = CoContributionGraph::from_edges({{1, 1}, {0, 2}, {2, 3}, {2, 3}, {3, 2}});
    EXPECT_EQ(edge_set(g), (std::set<std::pair<UserId, UserId>>{{2, 3}}));
    EXPECT_EQ(g.node_count(), 2u);
}

TEST(BuildGraphProperty, MatchesBipartiteProjection)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n_users = rng() % 50 + 1;
        const std::size_t n_elements = rng() % 200 + 1;
        std::vector<std::vector<std::int64_t>> rows(n_elements);
        std::vector<ElementHistory> hs;
        for (std::size_t e = 0; e < n_elements; ++e) {
            for (std::size_t k = rng() % 5 + 1; k > 0; --k)
                rows[e].push_back(static_cast<std::int64_t>(rng() % n_users) + 1);
            hs.push_back(element(static_cast<ElementId>(e + 1), rows[e]));
        }
        const auto sets = contributor_sets(hs);
        const auto g = build_graph(sets);
        EXPECT_EQ(edge_set(g), osmscale::testing::brute_projection(rows));

        std::size_t degree_sum = 0;
        for (auto d : degree_sequence(g))
            degree_sum += d;
        EXPECT_EQ(degree_sum, 2 * g.edge_count());
        for (const auto& e : g.edges()) {
            EXPECT_TRUE(g.contains(e.a));
            EXPECT_TRUE(g.contains(e.b));
            EXPECT_LT(e.a, e.b);
        }
    }
}

TEST(Degrees, TriangleAndStar)
{
    const auto tri = graph_of({{1, 2}, {2, 3}, {1, 3}});
    EXPECT_EQ(degree_sequence(tri), (std::vector<std::size_t>{2, 2, 2}));
    EXPECT_DOUBLE_EQ(mean_degree(tri), 2.0);
    const auto star = graph_of({{1, 2}, {1, 3}, {1, 4}});
    EXPECT_EQ(degree_sequence(star), (std::vector<std::size_t>{3, 1, 1, 1}));
    EXPECT_DOUBLE_EQ(mean_degree(star), 1.5);
    EXPECT_THROW(mean_degree(CoContributionGraph{}), EmptyGraph);
}

TEST(Degrees, MatchAdjacencyMatrix)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 30;
        std::vector<std::vector<int>> adj(n + 1, std::vector<int>(n + 1, 0));
        std::vector<Edge> edges;
        for (int k = 0; k < 80; ++k) {
            const int a = static_cast<int>(rng() % n) + 1, b = static_cast<int>(rng() % n) + 1;
            edges.push_back({a, b});
            if (a != b)
                adj[a][b] = adj[b][a] = 1;
        }
        const auto g = CoContributionGraph::from_edges(edges);
        const auto seq = degree_sequence(g);
        std::size_t idx = 0;
        for (int u = 1; u <= n; ++u) {
            int d = 0;
            for (int v = 1; v <= n; ++v)
                d += adj[u][v];
            if (d == 0) {
                EXPECT_FALSE(g.contains(u));
                continue;
            }
            ASSERT_LT(idx, seq.size());
            EXPECT_EQ(seq[idx++], static_cast<std::size_t>(d));
        }
        EXPECT_EQ(idx, seq.size());
    }
}

TEST(FilterTopHierarchies, InducedOnHubs)
{
    // clique of hubs {1,2} plus 9 leaves on each hub and 2 extra leaves on hub 1
    std::vector<Edge> edges{make_edge(1, 2)};
    for (UserId l = 100; l < 111; ++l)
        edges.push_back(make_edge(1, l));
    for (UserId l = 200; l < 209; ++l)
        edges.push_back(make_edge(2, l));
    const auto g = CoContributionGraph::from_edges(edges);
    const auto top = filter_top_hierarchies(g, 1);
    EXPECT_EQ(std::vector<UserId>(top.nodes().begin(), top.nodes().end()), (std::vector<UserId>{1, 2}));
    EXPECT_EQ(edge_set(top), (std::set<std::pair<UserId, UserId>>{{1, 2}}));
    // {12, 10} has one of two above its mean: 50%, so depth 2 saturates
    const auto deeper = filter_top_hierarchies(g, 2);
    EXPECT_EQ(edge_set(deeper), edge_set(top));
}

TEST(FilterTopHierarchies, UniformDegreesGiveEmptyGraph)
{
    const auto ring = CoContributionGraph::from_edges({{1, 2}, {2, 3}, {3, 4}, {4, 1}});
    EXPECT_TRUE(filter_top_hierarchies(ring, 1).empty());
    EXPECT_THROW(filter_top_hierarchies(CoContributionGraph{}, 1), EmptyInput);
}

TEST(FilterTopHierarchiesProperty, InducedSubgraph)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Edge> edges;
        // preferential-ish attachment so the degree sequence is heavy tailed
        std::vector<UserId> ends{1, 2};
        edges.push_back(make_edge(1, 2));
        for (UserId u = 3; u < 300; ++u)
            for (int k = 0; k < 2; ++k) {
                const UserId v = ends[rng() % ends.size()];
                edges.push_back(make_edge(u, v));
                ends.push_back(u);
                ends.push_back(v);
            }
        const auto g = CoContributionGraph::from_edges(edges);
        for (std::size_t levels = 1; levels <= 4; ++levels) {
            const auto top = filter_top_hierarchies(g, levels);
            EXPECT_LE(top.node_count(), g.node_count());
            EXPECT_LE(top.edge_count(), g.edge_count());
            std::set<UserId> kept(top.nodes().begin(), top.nodes().end());
            std::set<std::pair<UserId, UserId>> expected;
            for (const auto& e : g.edges())
                if (kept.count(e.a) && kept.count(e.b))
                    expected.emplace(e.a, e.b);
            EXPECT_EQ(edge_set(top), expected);
        }
    }
}

TEST(Snapshots, CumulativeYears)
{
    std::vector<ElementHistory> hs{element(1, {{1, make_timestamp(2007, 2, 1)},
                                               {2, make_timestamp(2007, 6, 1)},
                                               {3, make_timestamp(2008, 3, 1)}})};
    SnapshotBuilder b;
    for (const auto& h : hs)
        b.add(h);
    EXPECT_EQ(edge_set(b.graph_at(end_of_year(2007))), (std::set<std::pair<UserId, UserId>>{{1, 2}}));
    EXPECT_EQ(edge_set(b.graph_at(end_of_year(2008))),
              (std::set<std::pair<UserId, UserId>>{{1, 2}, {1, 3}, {2, 3}}));
    EXPECT_TRUE(b.graph_at(end_of_year(2006)).empty());

    const std::vector<int> years{2006, 2007, 2008};
    const auto rows = yearly_snapshots(hs, years, 10, 1);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].stats.n_nodes, 0u);
    EXPECT_FALSE(rows[0].stats.ht_index.has_value());
    EXPECT_EQ(rows[1].stats.n_edges, 1u);
    EXPECT_EQ(rows[2].stats.n_edges, 3u);
    EXPECT_EQ(rows[2].stats.max_degree, 2u);
}

TEST(Snapshots, EdgeTimeIsWhenBothHaveContributed)
{
    // the pair (1,2) exists from 2009 through element 5 even though element 6 pairs them only in 2011
    std::vector<ElementHistory> hs{
        element(5, {{1, make_timestamp(2008, 1, 1)}, {2, make_timestamp(2009, 1, 1)}}),
        element(6, {{2, make_timestamp(2005, 1, 1)}, {1, make_timestamp(2011, 1, 1)}}),
    };
    SnapshotBuilder b;
    for (const auto& h : hs)
        b.add(h);
    EXPECT_TRUE(b.graph_at(end_of_year(2008)).empty());
    EXPECT_EQ(b.graph_at(end_of_year(2009)).edge_count(), 1u);
}

TEST(SnapshotsProperty, NestedAndFinalEqualsFull)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ElementHistory> hs;
        for (ElementId id = 1; id <= 150; ++id) {
            std::vector<Contribution> cs;
            std::int64_t t = make_timestamp(2005, 1, 1).seconds + static_cast<std::int64_t>(rng() % (86400ull * 365 * 8));
            for (std::size_t k = rng() % 5 + 1; k > 0; --k) {
                cs.push_back({static_cast<UserId>(rng() % 40), Timestamp{t}});
                t += static_cast<std::int64_t>(rng() % (86400ull * 200));
            }
            hs.push_back(element(id, cs));
        }
        SnapshotBuilder b;
        for (const auto& h : hs)
            b.add(h);
        std::set<std::pair<UserId, UserId>> prev_edges;
        std::set<UserId> prev_nodes;
        for (int y = 2005; y <= 2016; ++y) {
            const auto g = b.graph_at(end_of_year(y));
            const auto edges = edge_set(g);
            const std::set<UserId> nodes(g.nodes().begin(), g.nodes().end());
            EXPECT_TRUE(std::includes(edges.begin(), edges.end(), prev_edges.begin(), prev_edges.end()));
            EXPECT_TRUE(std::includes(nodes.begin(), nodes.end(), prev_nodes.begin(), prev_nodes.end()));
            // each snapshot equals the graph rebuilt from cut contributor sets
            EXPECT_EQ(edges, edge_set(build_graph(contributor_sets(hs, end_of_year(y)))));
            prev_edges = edges;
            prev_nodes = nodes;
        }
        EXPECT_EQ(prev_edges, edge_set(build_graph(contributor_sets(hs))));
        EXPECT_EQ(edge_set(b.full_graph()), prev_edges);
    }
}

TEST(NetworkReports, Formats)
{
    const auto g = graph_of({{1, 3, 4}, {4, 9}});
    std::ostringstream edges, degrees;
    write_edge_list(edges, g);
    write_degree_list(degrees, g);
    EXPECT_EQ(edges.str(), "user_a\tuser_b\n1\t3\n1\t4\n3\t4\n4\t9\n");
    EXPECT_EQ(degrees.str(), "user_id\tdegree\n1\t2\n3\t2\n4\t3\n9\t1\n");

    std::vector<NetworkYearStats> rows{{2006, NetworkStats{}}};
    std::ostringstream yearly;
    write_yearly_stats(yearly, rows);
    EXPECT_EQ(yearly.str(), "year\tnodes\tedges\tmax_degree\tht_index\talpha\tp\n2006\t0\t0\t0\tNA\tNA\tNA\n");
}
