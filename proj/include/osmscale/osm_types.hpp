#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>

namespace osmscale {

enum class ElementType : std::uint8_t { node = 0, way = 1, relation = 2 };

using ElementId = std::int64_t;
using UserId = std::int64_t;
using Version = std::uint32_t;

//! uid used for versions that carry no uid attribute
inline constexpr UserId anonymous_user = 0;

//! Node, way and relation ids overlap in OSM, so every lookup is keyed by
//! (type, id). Ordering is type first, which is also planet dump order.
struct ElementKey
{
    ElementType type = ElementType::node;
    ElementId id = 0;

    friend auto operator<=>(const ElementKey&, const ElementKey&) = default;
};

struct Coordinate
{
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

struct Member
{
    ElementType type = ElementType::node;
    ElementId id = 0;

    friend bool operator==(const Member&, const Member&) = default;
};

std::string_view to_string(ElementType type);
std::optional<ElementType> parse_element_type(std::string_view text);

} // namespace osmscale
