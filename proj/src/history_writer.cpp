#include "osmscale/history_writer.hpp"
#include "osmscale/tsv.hpp"

#include <ostream>

namespace osmscale {

HistoryXmlWriter::HistoryXmlWriter(std::ostream& out)
    : out_(out)
{
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<osm version=\"0.6\" generator=\"osmscale\">\n";
}

HistoryXmlWriter::~HistoryXmlWriter()
{
    try {
        close();
    } catch (...) {
    }
}

void HistoryXmlWriter::write(const RawVersion& v)
{
    const std::string_view tag = to_string(v.element_type());
    out_ << " <" << tag << " id=\"" << v.element_id << "\" version=\"" << v.version
         << "\" timestamp=\"" << format_timestamp(v.timestamp) << '"';
    if (v.user_id != anonymous_user)
        out_ << " uid=\"" << v.user_id << '"';
    out_ << " visible=\"" << (v.visible ? "true" : "false") << '"';

    if (const auto* node = std::get_if<NodePayload>(&v.payload)) {
        if (node->coordinate)
            out_ << " lat=\"" << format_double(node->coordinate->lat) << "\" lon=\""
                 << format_double(node->coordinate->lon) << '"';
        out_ << "/>\n";
    } else if (const auto* way = std::get_if<WayPayload>(&v.payload)) {
        if (way->node_refs.empty()) {
            out_ << "/>\n";
            return;
        }
        out_ << ">\n";
        for (const ElementId ref : way->node_refs)
            out_ << "  <nd ref=\"" << ref << "\"/>\n";
        out_ << " </way>\n";
    } else if (const auto* rel = std::get_if<RelationPayload>(&v.payload)) {
        if (rel->members.empty()) {
            out_ << "/>\n";
            return;
        }
        out_ << ">\n";
        for (const Member& m : rel->members)
            out_ << "  <member type=\"" << to_string(m.type) << "\" ref=\"" << m.id
                 << "\" role=\"\"/>\n";
        out_ << " </relation>\n";
    }
}

void HistoryXmlWriter::close()
{
    if (closed_)
        return;
    closed_ = true;
    out_ << "</osm>\n";
}

void write_history_xml(std::ostream& out, std::span<const RawVersion> versions)
{
    HistoryXmlWriter writer(out);
    for (const auto& v : versions)
        writer.write(v);
    writer.close();
}

} // namespace osmscale
