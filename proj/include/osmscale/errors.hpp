#pragma once

#include "osmscale/osm_types.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace osmscale {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

//! XML or attribute level violation; line/column are 1-based, 0 when unknown.
class MalformedInput : public Error
{
public:
    MalformedInput(std::uint64_t line, std::uint64_t column, std::string reason);

    std::uint64_t line() const noexcept { return line_; }
    std::uint64_t column() const noexcept { return column_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::uint64_t line_;
    std::uint64_t column_;
    std::string reason_;
};

class MissingAttribute : public MalformedInput
{
public:
    MissingAttribute(std::uint64_t line, std::uint64_t column, std::string element,
                     std::string attribute);

    const std::string& attribute() const noexcept { return attribute_; }

private:
    std::string attribute_;
};

class OutOfOrderInput : public Error
{
public:
    explicit OutOfOrderInput(ElementKey key);

    ElementKey key() const noexcept { return key_; }
    ElementId element_id() const noexcept { return key_.id; }

private:
    ElementKey key_;
};

class DuplicateKey : public Error
{
public:
    explicit DuplicateKey(ElementKey key);

    ElementKey key() const noexcept { return key_; }

private:
    ElementKey key_;
};

class NotFound : public Error
{
public:
    explicit NotFound(ElementKey key);
};

class DegenerateTail : public Error
{
public:
    using Error::Error;
};

class InsufficientData : public Error
{
public:
    using Error::Error;
};

class EmptyInput : public Error
{
public:
    using Error::Error;
};

class EmptyGraph : public Error
{
public:
    using Error::Error;
};

} // namespace osmscale
