#pragma once

#include "osmscale/history_parser.hpp"

#include <iosfwd>
#include <span>

namespace osmscale {

/// Serializes versions in the OSM history XML layout read by HistoryReader.
/// Anonymous versions are written without a uid attribute.
class HistoryXmlWriter
{
public:
    explicit HistoryXmlWriter(std::ostream& out);
    ~HistoryXmlWriter();

    HistoryXmlWriter(const HistoryXmlWriter&) = delete;
    HistoryXmlWriter& operator=(const HistoryXmlWriter&) = delete;

    void write(const RawVersion& version);
    //! Writes the closing root tag; called by the destructor if needed.
    void close();

private:
    std::ostream& out_;
    bool closed_ = false;
};

void write_history_xml(std::ostream& out, std::span<const RawVersion> versions);

} // namespace osmscale
