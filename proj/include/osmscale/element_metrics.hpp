#pragma once

#include "osmscale/history_parser.hpp"
#include "osmscale/osm_types.hpp"
#include "osmscale/timestamp.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace osmscale {

/// Unique-node count of an element, or the marker for relations that
/// contain themselves through relation membership.
class ElementSize
{
public:
    static ElementSize of(std::uint64_t count) noexcept { return ElementSize(count, false); }
    static ElementSize excluded() noexcept { return ElementSize(0, true); }

    bool is_excluded() const noexcept { return excluded_; }
    //! 0 when excluded
    std::uint64_t count() const noexcept { return count_; }

    std::string to_string() const;

    friend bool operator==(const ElementSize&, const ElementSize&) = default;

private:
    ElementSize(std::uint64_t count, bool excluded) : count_(count), excluded_(excluded) {}

    std::uint64_t count_;
    bool excluded_;
};

struct ElementSummary
{
    ElementKey key;
    std::uint32_t n_users = 0; // distinct non-anonymous uids
    std::uint32_t n_edits = 0; // max version - 1
    //! Set for nodes and ways by summarize_element; relations are filled in
    //! by ElementStore::resolve_sizes.
    std::optional<ElementSize> size;
    //! payload of the highest version
    Payload latest;
    Timestamp first_timestamp;
    Timestamp last_timestamp;
};

struct UserContribution
{
    UserId user_id = 0;
    std::uint64_t n_elements = 0;

    friend bool operator==(const UserContribution&, const UserContribution&) = default;
};

struct SizeDiagnostics
{
    //! way/relation members whose target is absent from the dump
    std::uint64_t dangling_members = 0;
    std::uint64_t excluded_relations = 0;
};

ElementSummary summarize_element(const ElementHistory& history);

using SummaryLookup = std::function<const ElementSummary*(const ElementKey&)>;

/// Size per element type:
///  - node: 1
///  - way: unique ids among its latest node refs
///  - relation: unique node ids reached through node members, the node refs
///    of way members and, recursively, relation members. A relation that
///    reaches itself through relation membership is excluded.
/// Node ids are counted as ids. Way and relation members that cannot be
/// looked up contribute nothing and are counted in `diagnostics`.
ElementSize compute_size(const ElementSummary& summary, const SummaryLookup& lookup,
                         SizeDiagnostics* diagnostics = nullptr);

/// Accumulates "distinct elements touched" per non-anonymous user.
class UserContributionCounter
{
public:
    void add(const ElementHistory& history);
    //! ascending by user id
    std::vector<UserContribution> table() const;

private:
    std::unordered_map<UserId, std::uint64_t> counts_;
};

std::vector<UserContribution> user_contribution_counts(std::span<const ElementHistory> histories);

/// Summaries sorted by (type, id); lookups are binary searches.
class ElementStore
{
public:
    ElementStore() = default;

    //! Sorts the input; throws DuplicateKey when a key repeats.
    static ElementStore build(std::vector<ElementSummary> summaries);

    const ElementSummary* find(const ElementKey& key) const;
    //! Throws NotFound.
    const ElementSummary& at(const ElementKey& key) const;

    std::span<const ElementSummary> summaries() const noexcept { return summaries_; }
    std::size_t size() const noexcept { return summaries_.size(); }
    bool empty() const noexcept { return summaries_.empty(); }

    SummaryLookup lookup() const;

    //! Computes every missing size (relations) against this store.
    SizeDiagnostics resolve_sizes();

private:
    std::vector<ElementSummary> summaries_;
};

//! element_type, element_id, n_users, n_edits, size, last_timestamp
void write_element_table(std::ostream& out, std::span<const ElementSummary> summaries);
//! user_id, n_elements
void write_user_contributions(std::ostream& out, std::span<const UserContribution> table);

} // namespace osmscale
