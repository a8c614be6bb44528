#pragma once

#include "osmscale/element_metrics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace osmscale {

struct LonLat
{
    double lon = 0.0;
    double lat = 0.0;
};

//! Closed ring: at least 3 vertices, first == last.
using Ring = std::vector<LonLat>;

struct CountryBoundary
{
    std::string country_code;
    std::vector<Ring> rings; // first is the outer ring, the rest are holes
};

/// Reads the plain-text boundary format:
///
///   COUNTRY <code>
///   RING
///   <lon> <lat>
///   ...
///   RING
///   ...
///   END
///
/// Blank lines and lines starting with '#' are ignored. Throws
/// MalformedInput on unknown keywords, bad numbers or open rings.
std::vector<CountryBoundary> read_boundaries(std::istream& in);

/// Even-odd ray casting over all rings. An edge counts as crossed when its
/// endpoints lie on opposite sides of the horizontal line through the
/// point, with "above" meaning lat > point.lat (half-open in latitude), and
/// the crossing lies strictly east of the point.
bool point_in_polygon(double lon, double lat, const CountryBoundary& boundary);

/// Representative point: a node's latest coordinate; for ways, the first
/// node ref that resolves to a node with coordinates; for relations, the
/// first member (in order) that yields a point, recursing into member
/// relations once each.
std::optional<Coordinate> representative_point(const ElementSummary& summary,
                                               const ElementStore& store);

//! First boundary in file order containing the representative point.
std::optional<std::string> assign_country(const ElementSummary& summary,
                                          std::span<const CountryBoundary> boundaries,
                                          const ElementStore& store);

struct CountryAggregate
{
    std::string country_code;
    std::uint64_t n_elements = 0;
    std::uint64_t sum_users = 0;
    std::uint64_t sum_edits = 0;
    std::uint64_t sum_size = 0; // excluded sizes add 0

    friend bool operator==(const CountryAggregate&, const CountryAggregate&) = default;
};

inline constexpr const char* unassigned_code = "UNASSIGNED";

struct CountryTable
{
    //! descending n_elements, ties by code
    std::vector<CountryAggregate> countries;
    CountryAggregate unassigned{unassigned_code};
};

CountryTable aggregate_by_country(std::span<const ElementSummary> summaries,
                                  std::span<const CountryBoundary> boundaries,
                                  const ElementStore& store);

//! country_code n_elements sum_users sum_edits sum_size; UNASSIGNED row last
void write_country_table(std::ostream& out, const CountryTable& table);

} // namespace osmscale
