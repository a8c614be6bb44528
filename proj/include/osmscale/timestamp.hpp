#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace osmscale {

//! UTC instant with one-second resolution, as used by OSM history records.
struct Timestamp
{
    std::int64_t seconds = 0; // since 1970-01-01T00:00:00Z

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

//! Parses the strict OSM form "YYYY-MM-DDTHH:MM:SSZ".
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour = 0,
                         unsigned minute = 0, unsigned second = 0);

//! Last second of the given year, i.e. YYYY-12-31T23:59:59Z.
Timestamp end_of_year(int year);
int year_of(Timestamp ts);

} // namespace osmscale
