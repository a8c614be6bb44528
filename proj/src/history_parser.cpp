#include "osmscale/history_parser.hpp"
#include "osmscale/errors.hpp"

#include <expat.h>

#include <charconv>
#include <cstring>
#include <deque>
#include <exception>
#include <istream>
#include <string>
#include <string_view>

namespace osmscale {

ElementType payload_type(const Payload& payload) noexcept
{
    return static_cast<ElementType>(payload.index());
}

namespace {

const char* find_attribute(const XML_Char** atts, const char* name)
{
    for (; *atts != nullptr; atts += 2) {
        if (std::strcmp(atts[0], name) == 0)
            return atts[1];
    }
    return nullptr;
}

template <typename Int>
bool parse_integer(std::string_view text, Int& value)
{
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc{} && ptr == last && !text.empty();
}

bool parse_real(std::string_view text, double& value)
{
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    return ec == std::errc{} && ptr == last && !text.empty();
}

} // namespace

struct HistoryReader::Impl
{
    Impl(std::istream& in, std::size_t chunk_size)
        : in(in)
        , buffer(chunk_size == 0 ? 1 : chunk_size)
        , parser(XML_ParserCreate(nullptr))
    {
        if (parser == nullptr)
            throw std::bad_alloc();
        XML_SetUserData(parser, this);
        XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
    }

    ~Impl() { XML_ParserFree(parser); }

    Impl(const Impl&) = delete;
    Impl& operator=(const Impl&) = delete;

    std::istream& in;
    std::vector<char> buffer;
    XML_Parser parser;

    std::deque<RawVersion> ready;
    std::optional<RawVersion> current;
    std::exception_ptr failure;
    int depth = 0;
    bool finished = false;
    std::uint64_t versions_read = 0;

    std::uint64_t line() const { return XML_GetCurrentLineNumber(parser); }
    std::uint64_t column() const { return XML_GetCurrentColumnNumber(parser) + 1; }

    [[noreturn]] void malformed(std::string reason) const
    {
        throw MalformedInput(line(), column(), std::move(reason));
    }

    [[noreturn]] void missing(const char* element, const char* attribute) const
    {
        throw MissingAttribute(line(), column(), element, attribute);
    }

    const char* required(const XML_Char** atts, const char* element, const char* name) const
    {
        const char* value = find_attribute(atts, name);
        if (value == nullptr)
            missing(element, name);
        return value;
    }

    ElementId parse_id(const char* element, const char* name, const char* text) const
    {
        ElementId id = 0;
        if (!parse_integer(std::string_view(text), id) || id < 1)
            malformed(std::string("<") + element + "> attribute '" + name +
                      "' is not a positive integer: '" + text + "'");
        return id;
    }

    void begin_element(const char* name, const XML_Char** atts)
    {
        ElementType type;
        if (std::strcmp(name, "node") == 0)
            type = ElementType::node;
        else if (std::strcmp(name, "way") == 0)
            type = ElementType::way;
        else if (std::strcmp(name, "relation") == 0)
            type = ElementType::relation;
        else
            return; // bounds, changeset and friends

        RawVersion v;
        v.element_id = parse_id(name, "id", required(atts, name, "id"));

        const char* version_text = required(atts, name, "version");
        if (!parse_integer(std::string_view(version_text), v.version) || v.version < 1)
            malformed(std::string("<") + name + "> version is not a positive integer: '" +
                      version_text + "'");

        const char* ts_text = required(atts, name, "timestamp");
        const auto ts = parse_timestamp(ts_text);
        if (!ts)
            malformed(std::string("<") + name + "> timestamp is not YYYY-MM-DDTHH:MM:SSZ: '" +
                      ts_text + "'");
        v.timestamp = *ts;

        if (const char* uid = find_attribute(atts, "uid")) {
            if (!parse_integer(std::string_view(uid), v.user_id) || v.user_id < 0)
                malformed(std::string("<") + name + "> uid is not a non-negative integer: '" +
                          uid + "'");
        }

        if (const char* visible = find_attribute(atts, "visible")) {
            if (std::strcmp(visible, "true") == 0)
                v.visible = true;
            else if (std::strcmp(visible, "false") == 0)
                v.visible = false;
            else
                malformed(std::string("<") + name + "> visible must be true or false: '" +
                          visible + "'");
        }

        switch (type) {
        case ElementType::node: {
            NodePayload node;
            const char* lat = find_attribute(atts, "lat");
            const char* lon = find_attribute(atts, "lon");
            if (v.visible) {
                if (lat == nullptr)
                    missing(name, "lat");
                if (lon == nullptr)
                    missing(name, "lon");
            }
            if (lat != nullptr && lon != nullptr && v.visible) {
                Coordinate c;
                if (!parse_real(lat, c.lat) || c.lat < -90.0 || c.lat > 90.0)
                    malformed(std::string("<node> lat out of range: '") + lat + "'");
                if (!parse_real(lon, c.lon) || c.lon < -180.0 || c.lon > 180.0)
                    malformed(std::string("<node> lon out of range: '") + lon + "'");
                node.coordinate = c;
            }
            v.payload = node;
            break;
        }
        case ElementType::way:
            v.payload = WayPayload{};
            break;
        case ElementType::relation:
            v.payload = RelationPayload{};
            break;
        }
        current = std::move(v);
    }

    void begin_child(const char* name, const XML_Char** atts)
    {
        if (!current)
            return;
        if (std::strcmp(name, "nd") == 0) {
            auto* way = std::get_if<WayPayload>(&current->payload);
            if (way == nullptr)
                malformed("<nd> outside of <way>");
            way->node_refs.push_back(parse_id("nd", "ref", required(atts, "nd", "ref")));
        } else if (std::strcmp(name, "member") == 0) {
            auto* rel = std::get_if<RelationPayload>(&current->payload);
            if (rel == nullptr)
                malformed("<member> outside of <relation>");
            const char* type_text = required(atts, "member", "type");
            const auto type = parse_element_type(type_text);
            if (!type)
                malformed(std::string("<member> has unknown type '") + type_text + "'");
            rel->members.push_back(
                Member{*type, parse_id("member", "ref", required(atts, "member", "ref"))});
        }
        // <tag> and anything else is ignored
    }

    void start(const char* name, const XML_Char** atts)
    {
        ++depth;
        if (depth == 1) {
            if (std::strcmp(name, "osm") != 0)
                malformed(std::string("unexpected root element <") + name + ">");
        } else if (depth == 2) {
            begin_element(name, atts);
        } else if (depth == 3) {
            begin_child(name, atts);
        }
    }

    void end()
    {
        if (depth == 2 && current) {
            ready.push_back(std::move(*current));
            current.reset();
            ++versions_read;
        }
        --depth;
    }

    static void XMLCALL on_start(void* user_data, const XML_Char* name, const XML_Char** atts)
    {
        auto* self = static_cast<Impl*>(user_data);
        try {
            self->start(name, atts);
        } catch (...) {
            self->failure = std::current_exception();
            XML_StopParser(self->parser, XML_FALSE);
        }
    }

    static void XMLCALL on_end(void* user_data, const XML_Char*)
    {
        auto* self = static_cast<Impl*>(user_data);
        try {
            self->end();
        } catch (...) {
            self->failure = std::current_exception();
            XML_StopParser(self->parser, XML_FALSE);
        }
    }

    void feed()
    {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        const auto count = static_cast<int>(in.gcount());
        const bool final = count == 0 || in.eof();
        if (in.bad())
            throw MalformedInput(0, 0, "I/O error while reading input");
        const auto status = XML_Parse(parser, buffer.data(), count, final ? XML_TRUE : XML_FALSE);
        if (failure) {
            finished = true;
            std::rethrow_exception(failure);
        }
        if (status != XML_STATUS_OK) {
            finished = true;
            malformed(XML_ErrorString(XML_GetErrorCode(parser)));
        }
        if (final)
            finished = true;
    }
};

HistoryReader::HistoryReader(std::istream& in, std::size_t chunk_size)
    : impl_(std::make_unique<Impl>(in, chunk_size))
{
}

HistoryReader::~HistoryReader() = default;

std::optional<RawVersion> HistoryReader::next()
{
    while (impl_->ready.empty() && !impl_->finished)
        impl_->feed();
    if (impl_->ready.empty())
        return std::nullopt;
    RawVersion v = std::move(impl_->ready.front());
    impl_->ready.pop_front();
    return v;
}

std::uint64_t HistoryReader::versions_read() const noexcept
{
    return impl_->versions_read;
}

std::vector<RawVersion> parse_history(std::istream& in)
{
    HistoryReader reader(in);
    std::vector<RawVersion> versions;
    while (auto v = reader.next())
        versions.push_back(std::move(*v));
    return versions;
}

std::optional<ElementHistory> ElementGrouper::push(RawVersion version)
{
    const ElementKey key = version.key();
    if (current_ && current_->key == key) {
        if (version.version <= current_->versions.back().version)
            throw OutOfOrderInput(key);
        current_->versions.push_back(std::move(version));
        return std::nullopt;
    }

    std::optional<ElementHistory> closed;
    if (current_) {
        last_closed_ = current_->key;
        closed = std::move(current_);
    }
    if (last_closed_ && !(*last_closed_ < key))
        throw OutOfOrderInput(key);

    current_ = ElementHistory{key, {}};
    current_->versions.push_back(std::move(version));
    return closed;
}

std::optional<ElementHistory> ElementGrouper::finish()
{
    if (!current_)
        return std::nullopt;
    last_closed_ = current_->key;
    std::optional<ElementHistory> closed = std::move(current_);
    current_.reset();
    return closed;
}

std::vector<ElementHistory> group_by_element(std::vector<RawVersion> versions)
{
    ElementGrouper grouper;
    std::vector<ElementHistory> histories;
    for (auto& v : versions) {
        if (auto h = grouper.push(std::move(v)))
            histories.push_back(std::move(*h));
    }
    if (auto h = grouper.finish())
        histories.push_back(std::move(*h));
    return histories;
}

ElementHistoryReader::ElementHistoryReader(std::istream& in)
    : reader_(in)
{
}

std::optional<ElementHistory> ElementHistoryReader::next()
{
    if (drained_)
        return std::nullopt;
    while (auto v = reader_.next()) {
        if (auto h = grouper_.push(std::move(*v)))
            return h;
    }
    drained_ = true;
    return grouper_.finish();
}

} // namespace osmscale
