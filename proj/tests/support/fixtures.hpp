#pragma once

#include <cstdint>
#include <iterator>
#include <string>
#include <vector>

#include "tel/ledger.hpp"
#include "tel/record.hpp"
#include "tel/rng.hpp"
#include "tel/timestamp.hpp"

namespace tel::testing {

inline TripleEntryRecord make_record(const std::string& key, const std::string& from, const std::string& to,
                                     std::int64_t amount, const std::string& currency = "USD",
                                     const std::string& occurred_at = "2024-01-01T12:00:00Z") {
    TripleEntryRecord r;
    r.debits.push_back({"assets:" + to, {amount, currency}});
    r.credits.push_back({"assets:" + from, {amount, currency}});
    r.third.reference_key = key;
    r.third.metadata.party_from = from;
    r.third.metadata.party_to = to;
    r.third.metadata.occurred_at = occurred_at;
    return r;
}

/// Random balanced record with split legs and optional metadata.
inline TripleEntryRecord random_record(Rng& rng, const std::string& key) {
    static const std::vector<std::string> kParties = {"A", "B", "C", "D", "E"};
    static const std::vector<std::string> kLocations = {"NY", "LA", "SF", "café"};
    const std::size_t from = rng.uniform_below(kParties.size());
    std::size_t to = rng.uniform_below(kParties.size() - 1);
    if (to >= from) ++to;
    const std::int64_t total = 1 + static_cast<std::int64_t>(rng.uniform_below(1'000'000));
    TripleEntryRecord r = make_record(key, kParties[from], kParties[to], total);
    if (total > 1 && rng.uniform_below(2) == 0) {
        const std::int64_t part = 1 + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(total - 1)));
        r.debits = {{"expense:goods", {part, "USD"}}, {"expense:tax", {total - part, "USD"}}};
    }
    auto& m = r.third.metadata;
    if (rng.uniform_below(2) == 0) m.location = kLocations[rng.uniform_below(kLocations.size())];
    if (rng.uniform_below(2) == 0) m.item_description = "invoice " + std::to_string(rng.uniform_below(1000));
    if (rng.uniform_below(3) == 0) m.tags.insert("refund");
    if (rng.uniform_below(3) == 0) m.tags.insert("delivery_confirmed");
    if (rng.uniform_below(4) == 0) m.rationale = "quarterly restock";
    m.occurred_at = format_rfc3339(Timestamp{1'700'000'000 + static_cast<std::int64_t>(rng.uniform_below(10'000'000))});
    return r;
}

inline LedgerChain random_chain(Rng& rng, std::size_t length, const std::string& owner = kSharedOwner) {
    LedgerChain chain(owner);
    for (std::size_t i = 0; i < length; ++i) chain.append(random_record(rng, "T" + std::to_string(i)));
    return chain;
}

/// Flips one byte of one stored field of records[index] to a different value.
/// Returns a description of the mutated field.
inline std::string mutate_one_byte(TripleEntryRecord& r, Rng& rng) {
    std::vector<std::pair<std::string, std::string*>> strings;
    for (auto& leg : r.debits) {
        strings.emplace_back("debit.account", &leg.account);
        strings.emplace_back("debit.currency", &leg.amount.currency);
    }
    for (auto& leg : r.credits) {
        strings.emplace_back("credit.account", &leg.account);
        strings.emplace_back("credit.currency", &leg.amount.currency);
    }
    auto& t = r.third;
    strings.emplace_back("reference_key", &t.reference_key);
    strings.emplace_back("prev_record_hash", &t.prev_record_hash);
    strings.emplace_back("record_hash", &t.record_hash);
    strings.emplace_back("party_from", &t.metadata.party_from);
    strings.emplace_back("party_to", &t.metadata.party_to);
    strings.emplace_back("occurred_at", &t.metadata.occurred_at);
    if (t.metadata.location) strings.emplace_back("location", &*t.metadata.location);
    if (t.metadata.item_description) strings.emplace_back("item_description", &*t.metadata.item_description);
    if (t.metadata.rationale) strings.emplace_back("rationale", &*t.metadata.rationale);

    std::vector<std::int64_t*> amounts;
    for (auto& leg : r.debits) amounts.push_back(&leg.amount.minor_units);
    for (auto& leg : r.credits) amounts.push_back(&leg.amount.minor_units);

    const std::size_t tag_slots = t.metadata.tags.size();
    const std::size_t choice = rng.uniform_below(strings.size() + amounts.size() + tag_slots);
    const auto delta = static_cast<unsigned char>(1 + rng.uniform_below(255));
    if (choice >= strings.size() + amounts.size()) {
        auto it = std::next(t.metadata.tags.begin(), static_cast<std::ptrdiff_t>(choice - strings.size() - amounts.size()));
        std::string tag = *it;
        t.metadata.tags.erase(it);
        const std::size_t pos = rng.uniform_below(tag.size());
        tag[pos] = static_cast<char>(static_cast<unsigned char>(tag[pos]) ^ delta);
        t.metadata.tags.insert(tag);
        return "tags";
    }
    if (choice < strings.size()) {
        std::string& s = *strings[choice].second;
        const std::size_t pos = rng.uniform_below(s.size());
        s[pos] = static_cast<char>(static_cast<unsigned char>(s[pos]) ^ delta);
        return strings[choice].first;
    }
    std::int64_t* value = amounts[choice - strings.size()];
    const auto byte = static_cast<unsigned>(rng.uniform_below(8));
    *value = static_cast<std::int64_t>(static_cast<std::uint64_t>(*value) ^ (std::uint64_t{delta} << (8 * byte)));
    return "minor_units";
}

}  // namespace tel::testing
