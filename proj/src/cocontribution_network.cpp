#include "osmscale/cocontribution_network.hpp"
#include "osmscale/errors.hpp"
#include "osmscale/tsv.hpp"

#include <algorithm>
#include <ostream>

namespace osmscale {

ContributorSet contributor_set(const ElementHistory& history, std::optional<Timestamp> cutoff)
{
    ContributorSet set{history.key, {}};
    for (const RawVersion& v : history.versions) {
        if (v.user_id == anonymous_user)
            continue;
        if (cutoff && v.timestamp > *cutoff)
            continue;
        set.users.push_back(v.user_id);
    }
    std::sort(set.users.begin(), set.users.end());
    set.users.erase(std::unique(set.users.begin(), set.users.end()), set.users.end());
    return set;
}

std::vector<ContributorSet> contributor_sets(std::span<const ElementHistory> histories,
                                             std::optional<Timestamp> cutoff)
{
    std::vector<ContributorSet> sets;
    sets.reserve(histories.size());
    for (const auto& h : histories)
        sets.push_back(contributor_set(h, cutoff));
    return sets;
}

Edge make_edge(UserId u, UserId v) noexcept
{
    return u < v ? Edge{u, v} : Edge{v, u};
}

std::size_t EdgeHash::operator()(const Edge& e) const noexcept
{
    std::uint64_t h = static_cast<std::uint64_t>(e.a) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(e.b) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

CoContributionGraph CoContributionGraph::from_edges(std::vector<Edge> edges,
                                                    std::optional<Timestamp> cutoff)
{
    for (Edge& e : edges)
        e = make_edge(e.a, e.b);
    std::erase_if(edges, [](const Edge& e) { return e.a == e.b || e.a <= anonymous_user; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    CoContributionGraph g;
    g.cutoff_ = cutoff;
    g.nodes_.reserve(edges.size());
    for (const Edge& e : edges) {
        g.nodes_.push_back(e.a);
        g.nodes_.push_back(e.b);
    }
    std::sort(g.nodes_.begin(), g.nodes_.end());
    g.nodes_.erase(std::unique(g.nodes_.begin(), g.nodes_.end()), g.nodes_.end());

    auto index_of = [&g](UserId u) {
        return static_cast<std::size_t>(std::lower_bound(g.nodes_.begin(), g.nodes_.end(), u) -
                                        g.nodes_.begin());
    };
    std::vector<std::size_t> degree(g.nodes_.size(), 0);
    for (const Edge& e : edges) {
        ++degree[index_of(e.a)];
        ++degree[index_of(e.b)];
    }
    g.offsets_.assign(g.nodes_.size() + 1, 0);
    for (std::size_t i = 0; i < degree.size(); ++i)
        g.offsets_[i + 1] = g.offsets_[i] + degree[i];
    g.adjacency_.resize(g.offsets_.back());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const Edge& e : edges) {
        g.adjacency_[fill[index_of(e.a)]++] = e.b;
        g.adjacency_[fill[index_of(e.b)]++] = e.a;
    }
    for (std::size_t i = 0; i < g.nodes_.size(); ++i)
        std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                  g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
    g.edges_ = std::move(edges);
    return g;
}

bool CoContributionGraph::contains(UserId user) const
{
    return std::binary_search(nodes_.begin(), nodes_.end(), user);
}

std::span<const UserId> CoContributionGraph::neighbors(UserId user) const
{
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), user);
    if (it == nodes_.end() || *it != user)
        return {};
    const auto i = static_cast<std::size_t>(it - nodes_.begin());
    return std::span<const UserId>(adjacency_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

void GraphBuilder::add(std::span<const UserId> users)
{
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (users[i] == anonymous_user)
            continue;
        for (std::size_t j = i + 1; j < users.size(); ++j) {
            if (users[j] != anonymous_user && users[j] != users[i])
                edges_.insert(make_edge(users[i], users[j]));
        }
    }
}

CoContributionGraph GraphBuilder::build(std::optional<Timestamp> cutoff) const
{
    return CoContributionGraph::from_edges(std::vector<Edge>(edges_.begin(), edges_.end()), cutoff);
}

CoContributionGraph build_graph(std::span<const ContributorSet> sets)
{
    GraphBuilder builder;
    for (const auto& s : sets)
        builder.add(s);
    return builder.build();
}

std::vector<std::size_t> degree_sequence(const CoContributionGraph& graph)
{
    std::vector<std::size_t> degrees;
    degrees.reserve(graph.node_count());
    for (const UserId u : graph.nodes())
        degrees.push_back(graph.degree(u));
    return degrees;
}

double mean_degree(const CoContributionGraph& graph)
{
    if (graph.empty())
        throw EmptyGraph("mean degree of an empty graph");
    return 2.0 * static_cast<double>(graph.edge_count()) / static_cast<double>(graph.node_count());
}

namespace {

std::vector<double> degrees_as_reals(const CoContributionGraph& graph)
{
    const auto degrees = degree_sequence(graph);
    return std::vector<double>(degrees.begin(), degrees.end());
}

} // namespace

CoContributionGraph filter_top_hierarchies(const CoContributionGraph& graph, std::size_t levels,
                                           double threshold)
{
    if (graph.empty())
        throw EmptyInput("cannot filter an empty graph");
    const auto degrees = degrees_as_reals(graph);
    auto kept_degrees = top_hierarchy_filter(degrees, levels, threshold);
    if (kept_degrees.empty())
        return CoContributionGraph::from_edges({}, graph.built_cutoff());
    // Heads are "strictly above a mean", so the survivors are exactly the
    // nodes with degree >= the smallest surviving degree.
    const double floor = *std::min_element(kept_degrees.begin(), kept_degrees.end());
    std::vector<Edge> kept;
    for (const Edge& e : graph.edges()) {
        if (static_cast<double>(graph.degree(e.a)) >= floor &&
            static_cast<double>(graph.degree(e.b)) >= floor)
            kept.push_back(e);
    }
    return CoContributionGraph::from_edges(std::move(kept), graph.built_cutoff());
}

NetworkStats network_stats(const CoContributionGraph& graph, std::size_t n_synth, std::uint64_t seed,
                           double threshold)
{
    NetworkStats stats;
    stats.n_nodes = graph.node_count();
    stats.n_edges = graph.edge_count();
    if (graph.empty())
        return stats;
    const auto degrees = degrees_as_reals(graph);
    stats.max_degree = static_cast<std::size_t>(*std::max_element(degrees.begin(), degrees.end()));
    stats.ht_index = head_tail_breaks(degrees, threshold).ht_index;
    try {
        const PowerLawFit fit = fit_power_law(degrees, n_synth, seed);
        stats.alpha = fit.alpha;
        stats.p = fit.p;
    } catch (const InsufficientData&) {
    } catch (const DegenerateTail&) {
    }
    return stats;
}

void SnapshotBuilder::add(const ElementHistory& history)
{
    // first contribution instant per user on this element
    std::vector<std::pair<UserId, Timestamp>> first;
    for (const RawVersion& v : history.versions) {
        if (v.user_id == anonymous_user)
            continue;
        auto it = std::find_if(first.begin(), first.end(),
                               [&](const auto& p) { return p.first == v.user_id; });
        if (it == first.end())
            first.emplace_back(v.user_id, v.timestamp);
        else
            it->second = std::min(it->second, v.timestamp);
    }
    for (std::size_t i = 0; i < first.size(); ++i) {
        for (std::size_t j = i + 1; j < first.size(); ++j) {
            const Edge e = make_edge(first[i].first, first[j].first);
            const Timestamp t = std::max(first[i].second, first[j].second);
            auto [it, inserted] = first_seen_.try_emplace(e, t);
            if (!inserted)
                it->second = std::min(it->second, t);
        }
    }
}

CoContributionGraph SnapshotBuilder::graph_at(Timestamp cutoff) const
{
    std::vector<Edge> edges;
    for (const auto& [e, t] : first_seen_) {
        if (t <= cutoff)
            edges.push_back(e);
    }
    return CoContributionGraph::from_edges(std::move(edges), cutoff);
}

CoContributionGraph SnapshotBuilder::full_graph() const
{
    std::vector<Edge> edges;
    edges.reserve(first_seen_.size());
    for (const auto& entry : first_seen_)
        edges.push_back(entry.first);
    return CoContributionGraph::from_edges(std::move(edges));
}

std::vector<NetworkYearStats> SnapshotBuilder::yearly_stats(std::span<const int> years,
                                                            std::size_t n_synth, std::uint64_t seed,
                                                            double threshold) const
{
    if (!std::is_sorted(years.begin(), years.end()))
        throw std::invalid_argument("snapshot years must be ascending");
    std::vector<NetworkYearStats> rows;
    rows.reserve(years.size());
    for (const int year : years) {
        const auto graph = graph_at(end_of_year(year));
        rows.push_back(NetworkYearStats{
            year, network_stats(graph, n_synth, seed + static_cast<std::uint64_t>(year), threshold)});
    }
    return rows;
}

std::vector<NetworkYearStats> yearly_snapshots(std::span<const ElementHistory> histories,
                                               std::span<const int> years, std::size_t n_synth,
                                               std::uint64_t seed)
{
    SnapshotBuilder builder;
    for (const auto& h : histories)
        builder.add(h);
    return builder.yearly_stats(years, n_synth, seed);
}

void write_edge_list(std::ostream& out, const CoContributionGraph& graph)
{
    out << "user_a\tuser_b\n";
    for (const Edge& e : graph.edges())
        out << e.a << '\t' << e.b << '\n';
}

void write_degree_list(std::ostream& out, const CoContributionGraph& graph)
{
    out << "user_id\tdegree\n";
    for (const UserId u : graph.nodes())
        out << u << '\t' << graph.degree(u) << '\n';
}

namespace {

template <typename T>
std::string optional_field(const std::optional<T>& value)
{
    if (!value)
        return "NA";
    if constexpr (std::is_floating_point_v<T>)
        return format_double(*value);
    else
        return std::to_string(*value);
}

void write_stats_fields(std::ostream& out, const NetworkStats& s)
{
    out << s.n_nodes << '\t' << s.n_edges << '\t' << s.max_degree << '\t'
        << optional_field(s.ht_index) << '\t' << optional_field(s.alpha) << '\t'
        << optional_field(s.p) << '\n';
}

} // namespace

void write_network_stats(std::ostream& out, const NetworkStats& stats)
{
    out << "nodes\tedges\tmax_degree\tht_index\talpha\tp\n";
    write_stats_fields(out, stats);
}

void write_yearly_stats(std::ostream& out, std::span<const NetworkYearStats> rows)
{
    out << "year\tnodes\tedges\tmax_degree\tht_index\talpha\tp\n";
    for (const auto& row : rows) {
        out << row.year << '\t';
        write_stats_fields(out, row.stats);
    }
}

} // namespace osmscale
