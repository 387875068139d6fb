#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/ledger.hpp"

namespace tel {

struct MatchedPair {
    std::string reference_key;
    std::size_t index_a = 0;
    std::size_t index_b = 0;
};

struct Leftover {
    std::string reference_key;
    std::string present_in;  // owner of the chain holding the key

    friend bool operator==(const Leftover&, const Leftover&) = default;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;   // in chain a order
    std::vector<Leftover> leftovers;  // chain a leftovers, then chain b leftovers
};

/// Joins two chains on reference_key. Throws DuplicateKeyWithinChain.
MatchResult match_by_reference_key(const LedgerChain& a, const LedgerChain& b);

enum class MatchStatus { Consistent, AmountMismatch, MetadataDivergence };

std::string to_string(MatchStatus status);

struct MatchedEntry {
    std::string reference_key;
    MatchStatus status = MatchStatus::Consistent;
    std::int64_t amount_difference = 0;         // total(a) - total(b)
    std::vector<std::string> divergent_fields;  // sorted field names

    friend bool operator==(const MatchedEntry&, const MatchedEntry&) = default;
};

struct ReconciliationReport {
    std::vector<MatchedEntry> matched;
    std::vector<Leftover> unmatched;

    std::size_t count(MatchStatus status) const;
};

/// Amounts are compared as record totals, so a counterparty's mirrored
/// debit/credit legs still agree. Only metadata fields present on both sides
/// are compared. AmountMismatch takes precedence over MetadataDivergence; the
/// divergent field list is filled in either case.
ReconciliationReport reconcile(const LedgerChain& a, const LedgerChain& b);

nlohmann::json to_json(const ReconciliationReport& report);

}  // namespace tel
