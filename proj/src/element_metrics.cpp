#include "osmscale/element_metrics.hpp"
#include "osmscale/errors.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <unordered_set>

namespace osmscale {

std::string ElementSize::to_string() const
{
    return excluded_ ? std::string("EXCLUDED") : std::to_string(count_);
}

namespace {

std::uint64_t unique_count(const std::vector<ElementId>& ids)
{
    std::vector<ElementId> sorted(ids);
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::uint64_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

} // namespace

ElementSummary summarize_element(const ElementHistory& history)
{
    assert(!history.versions.empty());

    ElementSummary summary;
    summary.key = history.key;

    std::vector<UserId> users;
    users.reserve(history.versions.size());
    const RawVersion* latest = &history.versions.front();
    summary.first_timestamp = latest->timestamp;
    summary.last_timestamp = latest->timestamp;
    for (const RawVersion& v : history.versions) {
        if (v.user_id != anonymous_user)
            users.push_back(v.user_id);
        if (v.version > latest->version)
            latest = &v;
        summary.first_timestamp = std::min(summary.first_timestamp, v.timestamp);
        summary.last_timestamp = std::max(summary.last_timestamp, v.timestamp);
    }
    std::sort(users.begin(), users.end());
    summary.n_users = static_cast<std::uint32_t>(std::unique(users.begin(), users.end()) - users.begin());
    summary.n_edits = latest->version - 1;
    summary.latest = latest->payload;

    switch (history.key.type) {
    case ElementType::node:
        summary.size = ElementSize::of(1);
        break;
    case ElementType::way:
        summary.size = ElementSize::of(unique_count(std::get<WayPayload>(summary.latest).node_refs));
        break;
    case ElementType::relation:
        break;
    }
    return summary;
}

ElementSize compute_size(const ElementSummary& summary, const SummaryLookup& lookup,
                         SizeDiagnostics* diagnostics)
{
    switch (summary.key.type) {
    case ElementType::node:
        return ElementSize::of(1);
    case ElementType::way:
        return ElementSize::of(unique_count(std::get<WayPayload>(summary.latest).node_refs));
    case ElementType::relation:
        break;
    }

    std::unordered_set<ElementId> nodes;
    std::unordered_set<ElementId> visited_ways;
    std::unordered_set<ElementId> visited_relations;
    std::vector<const ElementSummary*> pending{&summary};
    std::uint64_t dangling = 0;

    while (!pending.empty()) {
        const ElementSummary* rel = pending.back();
        pending.pop_back();
        for (const Member& m : std::get<RelationPayload>(rel->latest).members) {
            switch (m.type) {
            case ElementType::node:
                nodes.insert(m.id);
                break;
            case ElementType::way: {
                if (!visited_ways.insert(m.id).second)
                    break;
                const ElementSummary* way = lookup(ElementKey{ElementType::way, m.id});
                if (way == nullptr) {
                    ++dangling;
                    break;
                }
                for (const ElementId ref : std::get<WayPayload>(way->latest).node_refs)
                    nodes.insert(ref);
                break;
            }
            case ElementType::relation: {
                if (m.id == summary.key.id) {
                    if (diagnostics != nullptr) {
                        diagnostics->dangling_members += dangling;
                        ++diagnostics->excluded_relations;
                    }
                    return ElementSize::excluded();
                }
                if (!visited_relations.insert(m.id).second)
                    break;
                const ElementSummary* child = lookup(ElementKey{ElementType::relation, m.id});
                if (child == nullptr) {
                    ++dangling;
                    break;
                }
                pending.push_back(child);
                break;
            }
            }
        }
    }
    if (diagnostics != nullptr)
        diagnostics->dangling_members += dangling;
    return ElementSize::of(nodes.size());
}

void UserContributionCounter::add(const ElementHistory& history)
{
    std::vector<UserId> users;
    users.reserve(history.versions.size());
    for (const RawVersion& v : history.versions) {
        if (v.user_id != anonymous_user)
            users.push_back(v.user_id);
    }
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    for (const UserId u : users)
        ++counts_[u];
}

std::vector<UserContribution> UserContributionCounter::table() const
{
    std::vector<UserContribution> rows;
    rows.reserve(counts_.size());
    for (const auto& [user, n] : counts_)
        rows.push_back(UserContribution{user, n});
    std::sort(rows.begin(), rows.end(),
              [](const auto& l, const auto& r) { return l.user_id < r.user_id; });
    return rows;
}

std::vector<UserContribution> user_contribution_counts(std::span<const ElementHistory> histories)
{
    UserContributionCounter counter;
    for (const auto& h : histories)
        counter.add(h);
    return counter.table();
}

ElementStore ElementStore::build(std::vector<ElementSummary> summaries)
{
    std::sort(summaries.begin(), summaries.end(),
              [](const auto& l, const auto& r) { return l.key < r.key; });
    const auto dup = std::adjacent_find(summaries.begin(), summaries.end(),
                                        [](const auto& l, const auto& r) { return l.key == r.key; });
    if (dup != summaries.end())
        throw DuplicateKey(dup->key);
    ElementStore store;
    store.summaries_ = std::move(summaries);
    return store;
}

const ElementSummary* ElementStore::find(const ElementKey& key) const
{
    const auto it = std::lower_bound(summaries_.begin(), summaries_.end(), key,
                                     [](const ElementSummary& s, const ElementKey& k) { return s.key < k; });
    if (it == summaries_.end() || it->key != key)
        return nullptr;
    return &*it;
}

const ElementSummary& ElementStore::at(const ElementKey& key) const
{
    const ElementSummary* s = find(key);
    if (s == nullptr)
        throw NotFound(key);
    return *s;
}

SummaryLookup ElementStore::lookup() const
{
    return [this](const ElementKey& key) { return find(key); };
}

SizeDiagnostics ElementStore::resolve_sizes()
{
    SizeDiagnostics diagnostics;
    const SummaryLookup resolve = lookup();
    // Relation sizes only read the latest payloads of other elements, never
    // their sizes, so results can be written back in place.
    for (ElementSummary& s : summaries_) {
        if (!s.size)
            s.size = compute_size(s, resolve, &diagnostics);
    }
    return diagnostics;
}

void write_element_table(std::ostream& out, std::span<const ElementSummary> summaries)
{
    out << "element_type\telement_id\tn_users\tn_edits\tsize\tlast_timestamp\n";
    for (const auto& s : summaries) {
        out << to_string(s.key.type) << '\t' << s.key.id << '\t' << s.n_users << '\t' << s.n_edits
            << '\t' << (s.size ? s.size->to_string() : std::string("NA")) << '\t'
            << format_timestamp(s.last_timestamp) << '\n';
    }
}

void write_user_contributions(std::ostream& out, std::span<const UserContribution> table)
{
    out << "user_id\tn_elements\n";
    for (const auto& row : table)
        out << row.user_id << '\t' << row.n_elements << '\n';
}

} // namespace osmscale
