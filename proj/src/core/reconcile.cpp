#include "tel/reconcile.hpp"

#include <unordered_map>

#include "tel/error.hpp"

namespace tel {

namespace {

std::unordered_map<std::string, std::size_t> index_keys(const LedgerChain& chain, const char* label) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (!index.emplace(chain[i].reference_key(), i).second) {
            throw Error(ErrorCode::DuplicateKeyWithinChain,
                        "reference_key '" + chain[i].reference_key() + "' repeats in chain " + label);
        }
    }
    return index;
}

std::string joined_tags(const ContextMetadata& m) {
    std::string out;
    for (const auto& t : m.tags) {
        out += t;
        out.push_back('\x1f');
    }
    return out;
}

std::vector<std::string> divergent_fields(const TripleEntryRecord& a, const TripleEntryRecord& b) {
    const ContextMetadata& ma = a.metadata();
    const ContextMetadata& mb = b.metadata();
    std::vector<std::string> fields;  // pushed in sorted order
    if (a.currency() != b.currency()) fields.emplace_back("currency");
    auto optional_field = [&](const char* name, const std::optional<std::string>& x,
                              const std::optional<std::string>& y) {
        if (x && y && *x != *y) fields.emplace_back(name);
    };
    optional_field("item_description", ma.item_description, mb.item_description);
    optional_field("location", ma.location, mb.location);
    if (ma.occurred_at != mb.occurred_at) fields.emplace_back("occurred_at");
    if (ma.party_from != mb.party_from) fields.emplace_back("party_from");
    if (ma.party_to != mb.party_to) fields.emplace_back("party_to");
    optional_field("rationale", ma.rationale, mb.rationale);
    if (!ma.tags.empty() && !mb.tags.empty() && joined_tags(ma) != joined_tags(mb)) fields.emplace_back("tags");
    return fields;
}

}  // namespace

MatchResult match_by_reference_key(const LedgerChain& a, const LedgerChain& b) {
    const auto index_a = index_keys(a, "a");
    const auto index_b = index_keys(b, "b");
    MatchResult result;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string& key = a[i].reference_key();
        if (auto it = index_b.find(key); it != index_b.end()) {
            result.pairs.push_back({key, i, it->second});
        } else {
            result.leftovers.push_back({key, a.owner()});
        }
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (!index_a.contains(b[j].reference_key())) result.leftovers.push_back({b[j].reference_key(), b.owner()});
    }
    return result;
}

std::string to_string(MatchStatus status) {
    switch (status) {
        case MatchStatus::Consistent: return "consistent";
        case MatchStatus::AmountMismatch: return "amount_mismatch";
        case MatchStatus::MetadataDivergence: return "metadata_divergence";
    }
    return "unknown";
}

std::size_t ReconciliationReport::count(MatchStatus status) const {
    std::size_t n = 0;
    for (const auto& m : matched) n += m.status == status;
    return n;
}

ReconciliationReport reconcile(const LedgerChain& a, const LedgerChain& b) {
    const MatchResult match = match_by_reference_key(a, b);
    ReconciliationReport report;
    report.unmatched = match.leftovers;
    for (const auto& pair : match.pairs) {
        const TripleEntryRecord& ra = a[pair.index_a];
        const TripleEntryRecord& rb = b[pair.index_b];
        MatchedEntry entry;
        entry.reference_key = pair.reference_key;
        entry.amount_difference = ra.total() - rb.total();
        entry.divergent_fields = divergent_fields(ra, rb);
        if (entry.amount_difference != 0) {
            entry.status = MatchStatus::AmountMismatch;
        } else if (!entry.divergent_fields.empty()) {
            entry.status = MatchStatus::MetadataDivergence;
        }
        report.matched.push_back(std::move(entry));
    }
    return report;
}

nlohmann::json to_json(const ReconciliationReport& report) {
    using nlohmann::json;
    json matched = json::array();
    for (const auto& m : report.matched) {
        matched.push_back(json{{"reference_key", m.reference_key},
                               {"status", to_string(m.status)},
                               {"amount_difference", m.amount_difference},
                               {"divergent_fields", m.divergent_fields}});
    }
    json unmatched = json::array();
    for (const auto& u : report.unmatched) {
        unmatched.push_back(json{{"reference_key", u.reference_key}, {"present_in", u.present_in}});
    }
    return json{{"matched", std::move(matched)},
                {"unmatched", std::move(unmatched)},
                {"summary", json{{"consistent", report.count(MatchStatus::Consistent)},
                                 {"amount_mismatch", report.count(MatchStatus::AmountMismatch)},
                                 {"metadata_divergence", report.count(MatchStatus::MetadataDivergence)},
                                 {"unmatched", report.unmatched.size()}}}};
}

}  // namespace tel
