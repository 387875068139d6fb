#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/ledger.hpp"

namespace tel {

inline constexpr std::uint64_t kFieldPrime = (std::uint64_t{1} << 61) - 1;

/// Element of the prime field of order 2^61 - 1.
struct FieldElement {
    std::uint64_t value = 0;
    friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

/// Throws InvalidArgument when value >= p.
FieldElement make_field_element(std::uint64_t value);
FieldElement field_add(FieldElement a, FieldElement b) noexcept;
FieldElement field_sub(FieldElement a, FieldElement b) noexcept;

/// Signed embedding: x >= 0 maps to x, x < 0 to p - |x|.
/// Throws MagnitudeTooLarge unless |x| < p / 4.
FieldElement encode_amount(std::int64_t minor_units);
/// Values above p / 2 decode as negatives.
std::int64_t decode_amount(FieldElement e) noexcept;

struct SecretShare {
    std::string party_id;
    FieldElement value;
    std::string session_id;
};

/// Source of the n - 1 free shares.
using ShareDraw = std::function<FieldElement()>;

/// Shares for parties "p1".."pn": the first n - 1 from draw, the last fixes
/// the sum to x. Throws TooFewParties when n < 2.
std::vector<SecretShare> share_secret(FieldElement x, std::size_t n, const ShareDraw& draw,
                                      const std::string& session_id = "");
/// Same, with shares drawn uniformly from a stream seeded by seed.
std::vector<SecretShare> share_secret(FieldElement x, std::size_t n, std::uint64_t seed,
                                      const std::string& session_id = "");

/// Sum of the shares. Throws IncompleteShareSet unless there are exactly
/// expected_parties shares with distinct party ids, MixedSessions when the
/// session ids differ.
FieldElement reconstruct_secret(const std::vector<SecretShare>& shares, std::size_t expected_parties);

/// Additive-sharing aggregation among simulated parties. Party i sums its
/// inputs, splits the local sum into one share per party (stream derived from
/// (seed, i)) and sends share j to party j. Each party adds what it received
/// and publishes that partial; only the sum of partials is opened.
/// Throws TooFewParties.
FieldElement secure_sum(const std::map<std::string, std::vector<FieldElement>>& inputs, std::uint64_t seed);

struct AuditPredicate {
    enum class Kind { NetBalanceZero, AggregateBelowThreshold };
    Kind kind = Kind::NetBalanceZero;
    std::int64_t limit = 0;

    std::string description() const;
};

/// "net_balance_zero" or "aggregate_below_threshold(<limit>)"; the limit may
/// also come separately. Throws UnknownPredicate.
AuditPredicate parse_predicate(const std::string& text, std::optional<std::int64_t> limit = std::nullopt);

struct OpenedValue {
    std::string name;
    FieldElement value;
    friend bool operator==(const OpenedValue&, const OpenedValue&) = default;
};

struct AuditTranscript {
    std::string session_id;
    std::vector<std::string> parties;
    std::vector<OpenedValue> opened_values;
    bool pass = false;
    std::string predicate;

    std::string verdict() const { return pass ? "pass" : "fail"; }
};

/// The value a party contributes from its own chain. For net_balance_zero it
/// is sum received minus sum paid by the owner; for aggregate_below_threshold
/// it is sum paid. Records in XXX are skipped.
/// Throws CurrencyMismatch when the chain mixes currencies.
std::int64_t private_aggregate(const LedgerChain& chain, const AuditPredicate& predicate);

/// Each chain's owner is one party. The joint aggregate is opened and the
/// predicate applied to it: net_balance_zero passes iff it is 0,
/// aggregate_below_threshold iff it is below the limit.
/// Throws TooFewParties, InvalidArgument (repeated owner), CurrencyMismatch.
AuditTranscript run_compliance_audit(const std::vector<LedgerChain>& chains, const AuditPredicate& predicate,
                                     std::uint64_t seed);

nlohmann::json to_json(const AuditTranscript& transcript);
AuditTranscript transcript_from_json(const nlohmann::json& j);
std::string canonical_transcript(const AuditTranscript& transcript);
std::string transcript_hash(const AuditTranscript& transcript);

inline constexpr const char* kAuditParty = "audit:mpc";
inline constexpr const char* kAttestationDebitAccount = "audit:attestation";
inline constexpr const char* kAttestationCreditAccount = "audit:clearing";

struct Attestation {
    std::string transcript_hash;
    std::string verdict;
    std::string session_id;
    std::string recorded_at;
};

/// The zero-amount XXX record carrying the verdict and transcript hash.
/// recorded_at defaults to the latest occurred_at in the chain, or the epoch
/// for an empty chain.
TripleEntryRecord attestation_record(const AuditTranscript& transcript, const LedgerChain& target,
                                     const std::optional<std::string>& recorded_at = std::nullopt);

/// Appends attestation_record to a copy of target. Propagates append errors,
/// so a repeated session is DuplicateReferenceKey.
LedgerChain emit_attestation(const AuditTranscript& transcript, LedgerChain target,
                             const std::optional<std::string>& recorded_at = std::nullopt);

/// Reads the attestation fields back from a record; nullopt if it is not one.
std::optional<Attestation> read_attestation(const TripleEntryRecord& record);

}  // namespace tel
