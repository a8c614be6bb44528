#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace osmscale {

//! Shortest decimal form that parses back to the same double.
std::string format_double(double value);
//! Rounds a fraction to the nearest whole percent, e.g. 0.1667 -> "17%".
std::string format_percent(double fraction);

std::vector<std::string_view> split_tabs(std::string_view line);

/// Header-indexed reader for the TSV reports this library writes.
class TsvTable
{
public:
    //! Throws MalformedInput on ragged rows or a missing header.
    static TsvTable read(std::istream& in);

    const std::vector<std::string>& header() const noexcept { return header_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    //! -1 when absent
    int column(std::string_view name) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace osmscale
