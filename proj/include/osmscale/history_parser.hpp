#pragma once

#include "osmscale/osm_types.hpp"
#include "osmscale/timestamp.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace osmscale {

struct NodePayload
{
    //! absent for deleted versions
    std::optional<Coordinate> coordinate;

    friend bool operator==(const NodePayload&, const NodePayload&) = default;
};

struct WayPayload
{
    std::vector<ElementId> node_refs;

    friend bool operator==(const WayPayload&, const WayPayload&) = default;
};

struct RelationPayload
{
    std::vector<Member> members;

    friend bool operator==(const RelationPayload&, const RelationPayload&) = default;
};

//! Alternative index matches the ElementType enumerator value.
using Payload = std::variant<NodePayload, WayPayload, RelationPayload>;

ElementType payload_type(const Payload& payload) noexcept;

/// One historical version of one element.
struct RawVersion
{
    ElementId element_id = 0;
    Version version = 0;
    Timestamp timestamp;
    UserId user_id = anonymous_user;
    bool visible = true;
    Payload payload;

    ElementType element_type() const noexcept { return payload_type(payload); }
    ElementKey key() const noexcept { return {element_type(), element_id}; }

    friend bool operator==(const RawVersion&, const RawVersion&) = default;
};

/// All versions of a single element, ascending by version number.
struct ElementHistory
{
    ElementKey key;
    std::vector<RawVersion> versions;
};

/// Pull parser over an OSM full-history XML stream.
///
/// Input is fed to the XML tokenizer in fixed-size chunks and completed
/// version records are handed out one at a time, so memory stays
/// proportional to the chunk size plus the largest single element record.
/// Tags and user names are skipped.
class HistoryReader
{
public:
    explicit HistoryReader(std::istream& in, std::size_t chunk_size = 64 * 1024);
    ~HistoryReader();

    HistoryReader(const HistoryReader&) = delete;
    HistoryReader& operator=(const HistoryReader&) = delete;

    //! Next version in file order, or nullopt at end of document.
    //! Throws MalformedInput / MissingAttribute.
    std::optional<RawVersion> next();

    std::uint64_t versions_read() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<RawVersion> parse_history(std::istream& in);

/// Groups a contiguous version stream into per-element histories.
///
/// Elements must arrive in (type, id) ascending order with ascending
/// versions, which is how planet history dumps are laid out. Under that
/// order a reappearing element is detected in constant memory.
class ElementGrouper
{
public:
    //! Returns the previous element's history when `version` starts a new one.
    std::optional<ElementHistory> push(RawVersion version);
    //! Flushes the open history, if any.
    std::optional<ElementHistory> finish();

private:
    std::optional<ElementHistory> current_;
    std::optional<ElementKey> last_closed_;
};

std::vector<ElementHistory> group_by_element(std::vector<RawVersion> versions);

/// HistoryReader + ElementGrouper.
class ElementHistoryReader
{
public:
    explicit ElementHistoryReader(std::istream& in);

    std::optional<ElementHistory> next();
    std::uint64_t versions_read() const noexcept { return reader_.versions_read(); }

private:
    HistoryReader reader_;
    ElementGrouper grouper_;
    bool drained_ = false;
};

} // namespace osmscale
