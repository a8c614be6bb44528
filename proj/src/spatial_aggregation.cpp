#include "osmscale/spatial_aggregation.hpp"
#include "osmscale/errors.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace osmscale {

namespace {

bool parse_coordinate(std::string_view text, double& value)
{
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

void close_ring(std::vector<CountryBoundary>& out, std::optional<Ring>& ring, std::uint64_t line)
{
    if (!ring)
        return;
    if (ring->size() < 3)
        throw MalformedInput(line, 1, "ring needs at least 3 vertices");
    if (ring->front().lon != ring->back().lon || ring->front().lat != ring->back().lat)
        throw MalformedInput(line, 1, "ring is not closed (first vertex must equal last)");
    out.back().rings.push_back(std::move(*ring));
    ring.reset();
}

} // namespace

std::vector<CountryBoundary> read_boundaries(std::istream& in)
{
    std::vector<CountryBoundary> boundaries;
    std::optional<Ring> ring;
    bool in_country = false;
    std::string line;
    std::uint64_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string first;
        if (!(tokens >> first) || first.front() == '#')
            continue;

        if (first == "COUNTRY") {
            if (in_country)
                throw MalformedInput(line_no, 1, "COUNTRY before END of previous country");
            std::string code;
            if (!(tokens >> code))
                throw MalformedInput(line_no, 1, "COUNTRY without a code");
            boundaries.push_back(CountryBoundary{code, {}});
            in_country = true;
        } else if (first == "RING") {
            if (!in_country)
                throw MalformedInput(line_no, 1, "RING outside of COUNTRY");
            close_ring(boundaries, ring, line_no);
            ring.emplace();
        } else if (first == "END") {
            if (!in_country)
                throw MalformedInput(line_no, 1, "END without COUNTRY");
            close_ring(boundaries, ring, line_no);
            if (boundaries.back().rings.empty())
                throw MalformedInput(line_no, 1, "country " + boundaries.back().country_code + " has no rings");
            in_country = false;
        } else {
            if (!ring)
                throw MalformedInput(line_no, 1, "unexpected '" + first + "'");
            std::string lat_text;
            std::string extra;
            LonLat p;
            if (!(tokens >> lat_text) || (tokens >> extra) || !parse_coordinate(first, p.lon) ||
                !parse_coordinate(lat_text, p.lat))
                throw MalformedInput(line_no, 1, "expected '<lon> <lat>'");
            if (p.lon < -180.0 || p.lon > 180.0 || p.lat < -90.0 || p.lat > 90.0)
                throw MalformedInput(line_no, 1, "coordinate out of range");
            ring->push_back(p);
        }
    }
    if (in_country)
        throw MalformedInput(line_no, 1, "missing END for country " + boundaries.back().country_code);
    return boundaries;
}

bool point_in_polygon(double lon, double lat, const CountryBoundary& boundary)
{
    bool inside = false;
    for (const Ring& ring : boundary.rings) {
        for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
            const LonLat& a = ring[i];
            const LonLat& b = ring[j];
            if ((a.lat > lat) != (b.lat > lat)) {
                const double x = a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
                if (lon < x)
                    inside = !inside;
            }
        }
    }
    return inside;
}

namespace {

std::optional<Coordinate> node_point(const ElementStore& store, ElementId id)
{
    const ElementSummary* node = store.find(ElementKey{ElementType::node, id});
    if (node == nullptr)
        return std::nullopt;
    return std::get<NodePayload>(node->latest).coordinate;
}

std::optional<Coordinate> way_point(const ElementStore& store, const ElementSummary& way)
{
    for (const ElementId ref : std::get<WayPayload>(way.latest).node_refs) {
        if (auto c = node_point(store, ref))
            return c;
    }
    return std::nullopt;
}

std::optional<Coordinate> relation_point(const ElementStore& store, const ElementSummary& rel,
                                         std::unordered_set<ElementId>& visited)
{
    if (!visited.insert(rel.key.id).second)
        return std::nullopt;
    for (const Member& m : std::get<RelationPayload>(rel.latest).members) {
        std::optional<Coordinate> c;
        switch (m.type) {
        case ElementType::node:
            c = node_point(store, m.id);
            break;
        case ElementType::way:
            if (const auto* way = store.find(ElementKey{ElementType::way, m.id}))
                c = way_point(store, *way);
            break;
        case ElementType::relation:
            if (const auto* child = store.find(ElementKey{ElementType::relation, m.id}))
                c = relation_point(store, *child, visited);
            break;
        }
        if (c)
            return c;
    }
    return std::nullopt;
}

std::optional<std::size_t> locate(const ElementSummary& summary,
                                  std::span<const CountryBoundary> boundaries,
                                  const ElementStore& store)
{
    const auto point = representative_point(summary, store);
    if (!point)
        return std::nullopt;
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        if (point_in_polygon(point->lon, point->lat, boundaries[i]))
            return i;
    }
    return std::nullopt;
}

void accumulate(CountryAggregate& agg, const ElementSummary& s)
{
    ++agg.n_elements;
    agg.sum_users += s.n_users;
    agg.sum_edits += s.n_edits;
    if (s.size && !s.size->is_excluded())
        agg.sum_size += s.size->count();
}

} // namespace

std::optional<Coordinate> representative_point(const ElementSummary& summary,
                                               const ElementStore& store)
{
    switch (summary.key.type) {
    case ElementType::node:
        return std::get<NodePayload>(summary.latest).coordinate;
    case ElementType::way:
        return way_point(store, summary);
    case ElementType::relation: {
        std::unordered_set<ElementId> visited;
        return relation_point(store, summary, visited);
    }
    }
    return std::nullopt;
}

std::optional<std::string> assign_country(const ElementSummary& summary,
                                          std::span<const CountryBoundary> boundaries,
                                          const ElementStore& store)
{
    const auto index = locate(summary, boundaries, store);
    if (!index)
        return std::nullopt;
    return boundaries[*index].country_code;
}

CountryTable aggregate_by_country(std::span<const ElementSummary> summaries,
                                  std::span<const CountryBoundary> boundaries,
                                  const ElementStore& store)
{
    CountryTable table;
    std::vector<CountryAggregate> per_boundary(boundaries.size());
    for (std::size_t i = 0; i < boundaries.size(); ++i)
        per_boundary[i].country_code = boundaries[i].country_code;

    for (const ElementSummary& s : summaries) {
        if (const auto index = locate(s, boundaries, store))
            accumulate(per_boundary[*index], s);
        else
            accumulate(table.unassigned, s);
    }

    // Several boundary blocks may share a code (e.g. exclaves); merge them.
    std::unordered_map<std::string, std::size_t> by_code;
    for (auto& agg : per_boundary) {
        if (agg.n_elements == 0)
            continue;
        const auto [it, inserted] = by_code.try_emplace(agg.country_code, table.countries.size());
        if (inserted) {
            table.countries.push_back(std::move(agg));
        } else {
            CountryAggregate& dst = table.countries[it->second];
            dst.n_elements += agg.n_elements;
            dst.sum_users += agg.sum_users;
            dst.sum_edits += agg.sum_edits;
            dst.sum_size += agg.sum_size;
        }
    }
    std::sort(table.countries.begin(), table.countries.end(), [](const auto& l, const auto& r) {
        if (l.n_elements != r.n_elements)
            return l.n_elements > r.n_elements;
        return l.country_code < r.country_code;
    });
    return table;
}

void write_country_table(std::ostream& out, const CountryTable& table)
{
    out << "country_code\tn_elements\tsum_users\tsum_edits\tsum_size\n";
    auto row = [&out](const CountryAggregate& a) {
        out << a.country_code << '\t' << a.n_elements << '\t' << a.sum_users << '\t' << a.sum_edits
            << '\t' << a.sum_size << '\n';
    };
    for (const auto& a : table.countries)
        row(a);
    row(table.unassigned);
}

} // namespace osmscale
