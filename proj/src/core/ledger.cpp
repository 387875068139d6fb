#include "tel/ledger.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "tel/error.hpp"
#include "tel/sha256.hpp"
#include "tel/timestamp.hpp"

namespace tel {

LedgerChain LedgerChain::from_stored(std::string owner, std::vector<TripleEntryRecord> records) {
    LedgerChain chain(std::move(owner));
    for (const auto& r : records) chain.keys_.insert(r.reference_key());
    chain.records_ = std::move(records);
    return chain;
}

const std::string& LedgerChain::tail_hash() const noexcept {
    return records_.empty() ? kGenesisHash : records_.back().third.record_hash;
}

const TripleEntryRecord& LedgerChain::append(TripleEntryRecord record) {
    if (keys_.contains(record.reference_key())) {
        throw Error(ErrorCode::DuplicateReferenceKey, "reference_key '" + record.reference_key() + "' already in chain");
    }
    const BalanceResult balance = balance_check(record);
    if (!balance.pass) {
        throw Error(ErrorCode::UnbalancedRecord, "record '" + record.reference_key() + "' is off by " +
                                                     std::to_string(balance.imbalance) + " minor units");
    }
    try {
        record.third.metadata.occurred_at = normalize_rfc3339(record.third.metadata.occurred_at);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidRecord, e.what());
    }
    record.third.prev_record_hash = tail_hash();
    record.third.record_hash.clear();
    record.third.record_hash = compute_record_hash(record);

    keys_.insert(record.reference_key());
    records_.push_back(std::move(record));
    return records_.back();
}

LedgerChain append_record(LedgerChain chain, TripleEntryRecord record) {
    chain.append(std::move(record));
    return chain;
}

VerificationReport verify_chain(const LedgerChain& chain) {
    std::unordered_set<std::string> seen;
    const auto& records = chain.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TripleEntryRecord& r = records[i];
        auto fail = [&](std::string reason) { return VerificationReport{false, i, std::move(reason)}; };

        if (sha256_hex(canonicalize_record_unchecked(r)) != r.third.record_hash) return fail("hash mismatch");
        const std::string& expected_prev = i == 0 ? kGenesisHash : records[i - 1].third.record_hash;
        if (r.third.prev_record_hash != expected_prev) return fail("broken link");
        try {
            validate_record(r);
        } catch (const Error& e) {
            return fail(std::string("invalid record: ") + e.what());
        }
        if (!seen.insert(r.reference_key()).second) return fail("duplicate reference key");
    }
    return {};
}

PartyView::PartyView(const LedgerChain& chain, std::string party) : chain_(&chain), party_(std::move(party)) {
    const auto& records = chain.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ContextMetadata& m = records[i].metadata();
        if (m.party_from == party_ || m.party_to == party_) indices_.push_back(i);
    }
}

LedgerChain PartyView::materialize() const {
    std::vector<TripleEntryRecord> selected;
    selected.reserve(indices_.size());
    for (std::size_t i : indices_) selected.push_back(chain_->records()[i]);
    return LedgerChain::from_stored(party_, std::move(selected));
}

PartyView derive_party_view(const LedgerChain& chain, const std::string& party) { return PartyView(chain, party); }

void write_jsonl(const LedgerChain& chain, std::ostream& out) {
    for (const auto& r : chain.records()) {
        out << record_to_json(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    }
}

void save_jsonl(const LedgerChain& chain, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    write_jsonl(chain, out);
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

LedgerChain read_jsonl(std::istream& in, std::string owner) {
    std::vector<TripleEntryRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return LedgerChain::from_stored(std::move(owner), std::move(records));
}

LedgerChain load_jsonl(const std::string& path, std::string owner) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::SourceUnreadable, "cannot open " + path);
    return read_jsonl(in, std::move(owner));
}

}  // namespace tel
