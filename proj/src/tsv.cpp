#include "osmscale/tsv.hpp"
#include "osmscale/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <system_error>

namespace osmscale {

std::string format_double(double value)
{
    if (std::isnan(value))
        return "NA";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{})
        return "NA";
    return std::string(buf, end);
}

std::string format_percent(double fraction)
{
    return std::to_string(std::lround(fraction * 100.0)) + "%";
}

std::vector<std::string_view> split_tabs(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

TsvTable TsvTable::read(std::istream& in)
{
    TsvTable table;
    std::string line;
    std::uint64_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split_tabs(line);
        if (!have_header) {
            table.header_.assign(fields.begin(), fields.end());
            have_header = true;
            continue;
        }
        if (fields.size() != table.header_.size()) {
            // trailing key/value lines such as "ht_index 3" are not part of the table
            if (fields.size() == 2 && table.header_.size() != 2)
                continue;
            throw MalformedInput(line_no, 1, "expected " + std::to_string(table.header_.size()) +
                                                 " columns, found " +
                                                 std::to_string(fields.size()));
        }
        table.rows_.emplace_back(fields.begin(), fields.end());
    }
    if (!have_header)
        throw MalformedInput(0, 0, "TSV input has no header row");
    return table;
}

int TsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name)
            return static_cast<int>(i);
    }
    return -1;
}

} // namespace osmscale
