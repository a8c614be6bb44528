#include "osmscale/osm_types.hpp"
#include "osmscale/errors.hpp"

#include <string>

namespace osmscale {

std::string_view to_string(ElementType type)
{
    switch (type) {
    case ElementType::node: return "node";
    case ElementType::way: return "way";
    case ElementType::relation: return "relation";
    }
    return "unknown";
}

std::optional<ElementType> parse_element_type(std::string_view text)
{
    if (text == "node")
        return ElementType::node;
    if (text == "way")
        return ElementType::way;
    if (text == "relation")
        return ElementType::relation;
    return std::nullopt;
}

namespace {

std::string describe(ElementKey key)
{
    return std::string(to_string(key.type)) + " " + std::to_string(key.id);
}

std::string position_prefix(std::uint64_t line, std::uint64_t column)
{
    if (line == 0)
        return {};
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
}

} // namespace

MalformedInput::MalformedInput(std::uint64_t line, std::uint64_t column, std::string reason)
    : Error(position_prefix(line, column) + reason)
    , line_(line)
    , column_(column)
    , reason_(std::move(reason))
{
}

MissingAttribute::MissingAttribute(std::uint64_t line, std::uint64_t column, std::string element,
                                   std::string attribute)
    : MalformedInput(line, column,
                     "<" + element + "> is missing required attribute '" + attribute + "'")
    , attribute_(std::move(attribute))
{
}

OutOfOrderInput::OutOfOrderInput(ElementKey key)
    : Error("out of order input at " + describe(key))
    , key_(key)
{
}

DuplicateKey::DuplicateKey(ElementKey key)
    : Error("duplicate element " + describe(key))
    , key_(key)
{
}

NotFound::NotFound(ElementKey key)
    : Error("element not found: " + describe(key))
{
}

} // namespace osmscale
