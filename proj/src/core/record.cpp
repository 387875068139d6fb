#include "tel/record.hpp"

#include "tel/error.hpp"
#include "tel/sha256.hpp"
#include "tel/timestamp.hpp"

namespace tel {

namespace {

using nlohmann::json;

json leg_to_json(const EntryLeg& leg) {
    return json{{"account", leg.account},
                {"amount", json{{"currency", leg.amount.currency}, {"minor_units", leg.amount.minor_units}}}};
}

EntryLeg leg_from_json(const json& j) {
    EntryLeg leg;
    leg.account = j.at("account").get<std::string>();
    const json& amount = j.at("amount");
    leg.amount.currency = amount.at("currency").get<std::string>();
    leg.amount.minor_units = amount.at("minor_units").get<std::int64_t>();
    return leg;
}

json metadata_to_json(const ContextMetadata& m) {
    json j = json::object();
    j["party_from"] = m.party_from;
    j["party_to"] = m.party_to;
    if (m.location) j["location"] = *m.location;
    if (m.item_description) j["item_description"] = *m.item_description;
    if (m.rationale) j["rationale"] = *m.rationale;
    j["tags"] = json::array();
    for (const auto& tag : m.tags) j["tags"].push_back(tag);
    j["occurred_at"] = m.occurred_at;
    return j;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

ContextMetadata metadata_from_json(const json& j) {
    ContextMetadata m;
    m.party_from = j.at("party_from").get<std::string>();
    m.party_to = j.at("party_to").get<std::string>();
    m.location = optional_string(j, "location");
    m.item_description = optional_string(j, "item_description");
    m.rationale = optional_string(j, "rationale");
    m.occurred_at = j.at("occurred_at").get<std::string>();
    if (auto it = j.find("tags"); it != j.end()) {
        for (const auto& tag : *it) m.tags.insert(tag.get<std::string>());
    }
    return m;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidRecord, what); }

void validate_leg(const EntryLeg& leg, const char* side) {
    if (leg.account.empty()) invalid(std::string(side) + " leg has an empty account");
    if (!is_currency_code(leg.amount.currency)) invalid("currency '" + leg.amount.currency + "' is not [A-Z]{3}");
    const std::int64_t units = leg.amount.minor_units;
    if (units > kMaxMinorUnits || units < -kMaxMinorUnits) invalid("amount magnitude exceeds 2^53");
    const bool zero_allowed = leg.amount.currency == kNoCurrency;
    if (units < 0 || (units == 0 && !zero_allowed)) {
        invalid(std::string(side) + " leg on '" + leg.account + "' must have a positive amount");
    }
}

}  // namespace

bool is_currency_code(const std::string& code) noexcept {
    if (code.size() != 3) return false;
    for (char c : code) {
        if (c < 'A' || c > 'Z') return false;
    }
    return true;
}

std::string TripleEntryRecord::currency() const {
    if (!debits.empty()) return debits.front().amount.currency;
    if (!credits.empty()) return credits.front().amount.currency;
    return {};
}

std::int64_t TripleEntryRecord::total() const {
    std::int64_t sum = 0;
    for (const auto& leg : debits) sum += leg.amount.minor_units;
    return sum;
}

BalanceResult balance_check(const TripleEntryRecord& record) {
    const std::string currency = record.currency();
    __int128 debit_sum = 0;
    __int128 credit_sum = 0;
    for (const auto& leg : record.debits) {
        if (leg.amount.currency != currency) {
            throw Error(ErrorCode::CurrencyMismatch, "legs mix " + currency + " and " + leg.amount.currency);
        }
        debit_sum += leg.amount.minor_units;
    }
    for (const auto& leg : record.credits) {
        if (leg.amount.currency != currency) {
            throw Error(ErrorCode::CurrencyMismatch, "legs mix " + currency + " and " + leg.amount.currency);
        }
        credit_sum += leg.amount.minor_units;
    }
    const __int128 diff = debit_sum - credit_sum;
    if (diff > INT64_MAX || diff < INT64_MIN) invalid("leg sums overflow");
    return {diff == 0, static_cast<std::int64_t>(diff)};
}

void validate_fields(const TripleEntryRecord& record) {
    if (record.debits.empty()) invalid("record has no debit legs");
    if (record.credits.empty()) invalid("record has no credit legs");
    for (const auto& leg : record.debits) validate_leg(leg, "debit");
    for (const auto& leg : record.credits) validate_leg(leg, "credit");

    const ThirdEntry& third = record.third;
    if (third.reference_key.empty()) invalid("empty reference_key");
    const ContextMetadata& m = third.metadata;
    if (m.party_from.empty() || m.party_to.empty()) invalid("party_from and party_to must be non-empty");
    if (m.party_from == m.party_to) invalid("party_from equals party_to ('" + m.party_from + "')");
    try {
        if (normalize_rfc3339(m.occurred_at) != m.occurred_at) {
            invalid("occurred_at '" + m.occurred_at + "' is not normalized UTC seconds");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidRecord) throw;
        invalid(e.what());
    }
    if (!is_hex64(third.prev_record_hash)) invalid("prev_record_hash is not 64 lowercase hex chars");
    if (!third.record_hash.empty() && !is_hex64(third.record_hash)) {
        invalid("record_hash is not 64 lowercase hex chars");
    }
}

void validate_record(const TripleEntryRecord& record) {
    validate_fields(record);
    BalanceResult balance;
    try {
        balance = balance_check(record);
    } catch (const Error& e) {
        invalid(e.what());
    }
    if (!balance.pass) invalid("debits and credits differ by " + std::to_string(balance.imbalance));
}

json record_to_json(const TripleEntryRecord& record) {
    json debits = json::array();
    for (const auto& leg : record.debits) debits.push_back(leg_to_json(leg));
    json credits = json::array();
    for (const auto& leg : record.credits) credits.push_back(leg_to_json(leg));
    return json{{"debits", std::move(debits)},
                {"credits", std::move(credits)},
                {"third", json{{"reference_key", record.third.reference_key},
                               {"metadata", metadata_to_json(record.third.metadata)},
                               {"prev_record_hash", record.third.prev_record_hash},
                               {"record_hash", record.third.record_hash}}}};
}

TripleEntryRecord record_from_json(const json& j) {
    try {
        TripleEntryRecord record;
        for (const auto& leg : j.at("debits")) record.debits.push_back(leg_from_json(leg));
        for (const auto& leg : j.at("credits")) record.credits.push_back(leg_from_json(leg));
        const json& third = j.at("third");
        record.third.reference_key = third.at("reference_key").get<std::string>();
        record.third.metadata = metadata_from_json(third.at("metadata"));
        record.third.prev_record_hash = third.value("prev_record_hash", kGenesisHash);
        record.third.record_hash = third.value("record_hash", std::string{});
        return record;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed record object: ") + e.what());
    }
}

std::string canonical_dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::strict); }

std::string canonicalize_record(const TripleEntryRecord& record) {
    validate_record(record);
    json j = record_to_json(record);
    j["third"]["record_hash"] = "";
    try {
        return canonical_dump(j);
    } catch (const json::type_error& e) {
        invalid(std::string("field is not valid UTF-8: ") + e.what());
    }
}

std::string canonicalize_record_unchecked(const TripleEntryRecord& record) {
    json j = record_to_json(record);
    j["third"]["record_hash"] = "";
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string compute_record_hash(const TripleEntryRecord& record) { return sha256_hex(canonicalize_record(record)); }

}  // namespace tel
