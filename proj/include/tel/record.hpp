#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tel {

inline constexpr std::int64_t kMaxMinorUnits = (std::int64_t{1} << 53) - 1;

/// ISO 4217 "no currency" code. Only legs in this currency may carry a zero
/// amount; attestation records use it.
inline constexpr const char* kNoCurrency = "XXX";

inline const std::string kGenesisHash(64, '0');

struct MonetaryAmount {
    std::int64_t minor_units = 0;
    std::string currency;

    friend bool operator==(const MonetaryAmount&, const MonetaryAmount&) = default;
};

struct EntryLeg {
    std::string account;
    MonetaryAmount amount;

    friend bool operator==(const EntryLeg&, const EntryLeg&) = default;
};

/// Who, what, where, when and why of a transaction.
struct ContextMetadata {
    std::string party_from;
    std::string party_to;
    std::optional<std::string> location;
    std::optional<std::string> item_description;
    std::set<std::string> tags;
    std::string occurred_at;  // RFC 3339, normalized to UTC seconds on append
    std::optional<std::string> rationale;

    friend bool operator==(const ContextMetadata&, const ContextMetadata&) = default;
};

struct ThirdEntry {
    std::string reference_key;
    ContextMetadata metadata;
    std::string prev_record_hash = kGenesisHash;
    std::string record_hash;

    friend bool operator==(const ThirdEntry&, const ThirdEntry&) = default;
};

struct TripleEntryRecord {
    std::vector<EntryLeg> debits;
    std::vector<EntryLeg> credits;
    ThirdEntry third;

    const std::string& reference_key() const noexcept { return third.reference_key; }
    const ContextMetadata& metadata() const noexcept { return third.metadata; }

    /// Currency of the first leg; empty for a record without legs.
    std::string currency() const;

    /// Sum of debit minor units (equal to the credit sum for a balanced record).
    std::int64_t total() const;

    friend bool operator==(const TripleEntryRecord&, const TripleEntryRecord&) = default;
};

struct BalanceResult {
    bool pass = false;
    std::int64_t imbalance = 0;  // sum(debits) - sum(credits)
};

/// Throws Error(CurrencyMismatch) when the legs do not share a currency.
BalanceResult balance_check(const TripleEntryRecord& record);

/// Checks every field invariant except balance. Throws Error(InvalidRecord).
void validate_fields(const TripleEntryRecord& record);

/// Field invariants plus balance; any failure is reported as InvalidRecord.
void validate_record(const TripleEntryRecord& record);

/// JSON object with the record_hash field as stored. No validation.
nlohmann::json record_to_json(const TripleEntryRecord& record);

/// Parses a record object. Throws Error(Parse) on a structural mismatch;
/// invariants are not checked here.
TripleEntryRecord record_from_json(const nlohmann::json& j);

/// Canonical bytes: sorted keys, compact, UTF-8 unescaped, record_hash blank.
/// Throws Error(InvalidRecord) if the record violates an invariant.
std::string canonicalize_record(const TripleEntryRecord& record);

/// Canonical bytes without invariant checks. Used by chain verification so
/// that tampered records can still be hashed and reported.
std::string canonicalize_record_unchecked(const TripleEntryRecord& record);

/// Lowercase hex SHA-256 of canonicalize_record.
std::string compute_record_hash(const TripleEntryRecord& record);

/// Compact, key-sorted dump shared by every canonical document in the library.
std::string canonical_dump(const nlohmann::json& j);

bool is_currency_code(const std::string& code) noexcept;

}  // namespace tel
