#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "tel/record.hpp"

namespace tel {

inline constexpr const char* kSharedOwner = "shared";

struct VerificationReport {
    bool ok = true;
    std::optional<std::size_t> failing_index;
    std::string reason;  // "hash mismatch", "broken link", ... ; empty when ok
};

/// Append-only, genesis-anchored hash chain of triple-entry records.
///
/// A chain has one writer. Readers may run concurrently with each other but
/// not with append(); the C API handle adds the lock for shared use.
class LedgerChain {
public:
    explicit LedgerChain(std::string owner = kSharedOwner) : owner_(std::move(owner)) {}

    /// Builds a chain from stored records as-is, without recomputing hashes.
    /// Use verify_chain() to check the result.
    static LedgerChain from_stored(std::string owner, std::vector<TripleEntryRecord> records);

    /// Links the record to the tail, seals it with its hash and stores it.
    /// occurred_at is normalized to UTC seconds first; incoming prev/record
    /// hashes are overwritten.
    /// Throws DuplicateReferenceKey, UnbalancedRecord, CurrencyMismatch or
    /// InvalidRecord.
    const TripleEntryRecord& append(TripleEntryRecord record);

    const std::vector<TripleEntryRecord>& records() const noexcept { return records_; }
    const std::string& owner() const noexcept { return owner_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const TripleEntryRecord& operator[](std::size_t i) const { return records_.at(i); }

    bool contains_key(const std::string& reference_key) const { return keys_.contains(reference_key); }

    /// record_hash of the tail, or the genesis constant.
    const std::string& tail_hash() const noexcept;

    /// Mutable access for fault-injection tests only. Bypasses every invariant.
    std::vector<TripleEntryRecord>& mutable_records_for_testing() noexcept { return records_; }

private:
    std::string owner_;
    std::vector<TripleEntryRecord> records_;
    std::unordered_set<std::string> keys_;
};

/// Functional form: returns a copy of the chain with the record appended.
LedgerChain append_record(LedgerChain chain, TripleEntryRecord record);

/// Recomputes every record hash and prev link. Never throws.
VerificationReport verify_chain(const LedgerChain& chain);

/// Read-only subsequence of a chain's records involving one party.
class PartyView {
public:
    PartyView(const LedgerChain& chain, std::string party);

    const std::string& party() const noexcept { return party_; }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    const TripleEntryRecord& operator[](std::size_t i) const { return chain_->records()[indices_.at(i)]; }

    /// Copy of the selected records, owned by the party. Hash links are kept
    /// as stored, so the copy generally does not verify as a chain.
    LedgerChain materialize() const;

private:
    const LedgerChain* chain_;
    std::string party_;
    std::vector<std::size_t> indices_;
};

PartyView derive_party_view(const LedgerChain& chain, const std::string& party);

/// One stored record object per line, LF-terminated.
void write_jsonl(const LedgerChain& chain, std::ostream& out);
void save_jsonl(const LedgerChain& chain, const std::string& path);

/// Reads stored records without re-hashing. Throws Error(Parse) naming the
/// 1-based line, or Error(SourceUnreadable).
LedgerChain read_jsonl(std::istream& in, std::string owner);
LedgerChain load_jsonl(const std::string& path, std::string owner);

}  // namespace tel
