#pragma once

#include "osmscale/history_parser.hpp"
#include "osmscale/osm_types.hpp"
#include "osmscale/scaling_stats.hpp"
#include "osmscale/timestamp.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace osmscale {

struct ContributorSet
{
    ElementKey element;
    std::vector<UserId> users; // sorted, unique, all > 0
};

//! Distinct non-anonymous users among versions with timestamp <= cutoff.
ContributorSet contributor_set(const ElementHistory& history,
                               std::optional<Timestamp> cutoff = std::nullopt);

std::vector<ContributorSet> contributor_sets(std::span<const ElementHistory> histories,
                                             std::optional<Timestamp> cutoff = std::nullopt);

struct Edge
{
    UserId a = 0; // a < b
    UserId b = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

Edge make_edge(UserId u, UserId v) noexcept;

struct EdgeHash
{
    std::size_t operator()(const Edge& e) const noexcept;
};

/// Undirected, unweighted user graph. Nodes are users with at least one
/// edge; users who only ever contributed alone are not part of it.
/// Adjacency is stored as sorted neighbour lists (CSR) keyed by the sorted
/// node list.
class CoContributionGraph
{
public:
    CoContributionGraph() = default;
    //! Deduplicates; self-loops and anonymous endpoints are dropped.
    static CoContributionGraph from_edges(std::vector<Edge> edges,
                                          std::optional<Timestamp> cutoff = std::nullopt);

    std::span<const UserId> nodes() const noexcept { return nodes_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    bool contains(UserId user) const;
    //! empty span for unknown users
    std::span<const UserId> neighbors(UserId user) const;
    std::size_t degree(UserId user) const { return neighbors(user).size(); }

    std::optional<Timestamp> built_cutoff() const noexcept { return cutoff_; }

private:
    std::vector<UserId> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<UserId> adjacency_;
    std::optional<Timestamp> cutoff_;
};

/// Clique expansion of contributor sets, accumulated one element at a time.
class GraphBuilder
{
public:
    void add(std::span<const UserId> users);
    void add(const ContributorSet& set) { add(set.users); }

    std::size_t edge_count() const noexcept { return edges_.size(); }

    CoContributionGraph build(std::optional<Timestamp> cutoff = std::nullopt) const;

private:
    std::unordered_set<Edge, EdgeHash> edges_;
};

CoContributionGraph build_graph(std::span<const ContributorSet> sets);

//! One entry per node, in ascending node id order.
std::vector<std::size_t> degree_sequence(const CoContributionGraph& graph);
//! 2|E|/|V|; throws EmptyGraph.
double mean_degree(const CoContributionGraph& graph);

/// Induced subgraph on the nodes whose degree is in
/// top_hierarchy_filter(degrees, levels). Throws EmptyInput on an empty graph.
CoContributionGraph filter_top_hierarchies(const CoContributionGraph& graph, std::size_t levels,
                                           double threshold = default_htb_threshold);

struct NetworkStats
{
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    std::size_t max_degree = 0;
    std::optional<int> ht_index;  // absent for an empty graph
    std::optional<double> alpha;  // absent when the degrees cannot be fitted
    std::optional<double> p;
};

struct NetworkYearStats
{
    int year = 0;
    NetworkStats stats;
};

NetworkStats network_stats(const CoContributionGraph& graph, std::size_t n_synth,
                           std::uint64_t seed, double threshold = default_htb_threshold);

/// Cumulative year-end snapshots built in one pass: every edge remembers
/// the earliest instant at which both endpoints had contributed to a
/// common element, and the snapshot for year Y keeps the edges with that
/// instant <= Y-12-31T23:59:59Z.
class SnapshotBuilder
{
public:
    void add(const ElementHistory& history);

    CoContributionGraph graph_at(Timestamp cutoff) const;
    CoContributionGraph full_graph() const;

    //! `years` must be ascending.
    std::vector<NetworkYearStats> yearly_stats(std::span<const int> years, std::size_t n_synth,
                                               std::uint64_t seed,
                                               double threshold = default_htb_threshold) const;

private:
    std::unordered_map<Edge, Timestamp, EdgeHash> first_seen_;
};

std::vector<NetworkYearStats> yearly_snapshots(std::span<const ElementHistory> histories,
                                               std::span<const int> years, std::size_t n_synth,
                                               std::uint64_t seed);

//! "user_a user_b" rows, sorted
void write_edge_list(std::ostream& out, const CoContributionGraph& graph);
//! "user_id degree" rows, ascending user id
void write_degree_list(std::ostream& out, const CoContributionGraph& graph);
void write_network_stats(std::ostream& out, const NetworkStats& stats);
void write_yearly_stats(std::ostream& out, std::span<const NetworkYearStats> rows);

} // namespace osmscale
