#include "tel/mpc.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "tel/error.hpp"
#include "tel/rng.hpp"
#include "tel/sha256.hpp"
#include "tel/timestamp.hpp"

namespace tel {

namespace {

constexpr std::int64_t kEncodeBound = static_cast<std::int64_t>(kFieldPrime / 4);

FieldElement uniform_element(Rng& rng) { return FieldElement{rng.uniform_below(kFieldPrime)}; }

std::string party_name(std::size_t i) { return "p" + std::to_string(i + 1); }

}  // namespace

FieldElement make_field_element(std::uint64_t value) {
    if (value >= kFieldPrime) throw Error(ErrorCode::InvalidArgument, "value outside the field");
    return FieldElement{value};
}

FieldElement field_add(FieldElement a, FieldElement b) noexcept {
    std::uint64_t s = a.value + b.value;  // < 2^62, no overflow
    if (s >= kFieldPrime) s -= kFieldPrime;
    return FieldElement{s};
}

FieldElement field_sub(FieldElement a, FieldElement b) noexcept {
    return FieldElement{a.value >= b.value ? a.value - b.value : a.value + kFieldPrime - b.value};
}

FieldElement encode_amount(std::int64_t minor_units) {
    if (minor_units <= -kEncodeBound || minor_units >= kEncodeBound) {
        throw Error(ErrorCode::MagnitudeTooLarge, "amount outside (-p/4, p/4)");
    }
    if (minor_units >= 0) return FieldElement{static_cast<std::uint64_t>(minor_units)};
    return FieldElement{kFieldPrime - static_cast<std::uint64_t>(-minor_units)};
}

std::int64_t decode_amount(FieldElement e) noexcept {
    if (e.value > kFieldPrime / 2) return -static_cast<std::int64_t>(kFieldPrime - e.value);
    return static_cast<std::int64_t>(e.value);
}

std::vector<SecretShare> share_secret(FieldElement x, std::size_t n, const ShareDraw& draw,
                                      const std::string& session_id) {
    if (n < 2) throw Error(ErrorCode::TooFewParties, "sharing needs at least 2 parties");
    if (x.value >= kFieldPrime) throw Error(ErrorCode::InvalidArgument, "secret outside the field");
    std::vector<SecretShare> shares;
    shares.reserve(n);
    FieldElement last = x;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const FieldElement s = make_field_element(draw().value);
        last = field_sub(last, s);
        shares.push_back(SecretShare{party_name(i), s, session_id});
    }
    shares.push_back(SecretShare{party_name(n - 1), last, session_id});
    return shares;
}

std::vector<SecretShare> share_secret(FieldElement x, std::size_t n, std::uint64_t seed,
                                      const std::string& session_id) {
    Rng rng(seed);
    return share_secret(x, n, [&rng] { return uniform_element(rng); }, session_id);
}

FieldElement reconstruct_secret(const std::vector<SecretShare>& shares, std::size_t expected_parties) {
    std::set<std::string> ids;
    for (const auto& s : shares) ids.insert(s.party_id);
    if (shares.size() != expected_parties || ids.size() != shares.size()) {
        throw Error(ErrorCode::IncompleteShareSet, "expected " + std::to_string(expected_parties) +
                                                       " shares from distinct parties, got " +
                                                       std::to_string(shares.size()));
    }
    FieldElement sum;
    for (const auto& s : shares) {
        if (s.session_id != shares.front().session_id) {
            throw Error(ErrorCode::MixedSessions, "shares come from different sessions");
        }
        sum = field_add(sum, s.value);
    }
    return sum;
}

FieldElement secure_sum(const std::map<std::string, std::vector<FieldElement>>& inputs, std::uint64_t seed) {
    const std::size_t n = inputs.size();
    if (n < 2) throw Error(ErrorCode::TooFewParties, "secure sum needs at least 2 parties");

    // received[j] accumulates the shares party j gets from everyone.
    std::vector<FieldElement> received(n);
    std::size_t i = 0;
    for (const auto& [party, values] : inputs) {
        FieldElement local;
        for (const FieldElement& v : values) local = field_add(local, make_field_element(v.value));
        const auto shares = share_secret(local, n, derive_seed(seed, i), party);
        for (std::size_t j = 0; j < n; ++j) received[j] = field_add(received[j], shares[j].value);
        ++i;
    }
    // Opening: every partial is published and summed.
    FieldElement aggregate;
    for (const FieldElement& partial : received) aggregate = field_add(aggregate, partial);
    return aggregate;
}

std::string AuditPredicate::description() const {
    if (kind == Kind::NetBalanceZero) return "net_balance_zero";
    return "aggregate_below_threshold(" + std::to_string(limit) + ")";
}

AuditPredicate parse_predicate(const std::string& text, std::optional<std::int64_t> limit) {
    AuditPredicate p;
    if (text == "net_balance_zero") return p;
    static const std::regex with_limit(R"(aggregate_below_threshold\((-?[0-9]{1,18})\))");
    std::smatch m;
    p.kind = AuditPredicate::Kind::AggregateBelowThreshold;
    if (std::regex_match(text, m, with_limit)) {
        p.limit = std::stoll(m[1].str());
        return p;
    }
    if (text == "aggregate_below_threshold" && limit) {
        p.limit = *limit;
        return p;
    }
    if (text == "aggregate_below_threshold") {
        throw Error(ErrorCode::UnknownPredicate, "aggregate_below_threshold needs a limit");
    }
    throw Error(ErrorCode::UnknownPredicate, "unknown predicate '" + text + "'");
}

std::int64_t private_aggregate(const LedgerChain& chain, const AuditPredicate& predicate) {
    const std::string& owner = chain.owner();
    std::string currency;
    std::int64_t total = 0;
    for (const auto& r : chain.records()) {
        const std::string c = r.currency();
        if (c.empty() || c == kNoCurrency) continue;
        if (currency.empty()) currency = c;
        if (c != currency) {
            throw Error(ErrorCode::CurrencyMismatch, "chain of '" + owner + "' mixes " + currency + " and " + c);
        }
        const ContextMetadata& m = r.metadata();
        const std::int64_t amount = r.total();
        if (predicate.kind == AuditPredicate::Kind::NetBalanceZero) {
            if (m.party_to == owner) total += amount;
            if (m.party_from == owner) total -= amount;
        } else if (m.party_from == owner) {
            total += amount;
        }
        if (total <= -kEncodeBound || total >= kEncodeBound) {
            throw Error(ErrorCode::MagnitudeTooLarge, "aggregate of '" + owner + "' exceeds the field range");
        }
    }
    return total;
}

AuditTranscript run_compliance_audit(const std::vector<LedgerChain>& chains, const AuditPredicate& predicate,
                                     std::uint64_t seed) {
    if (chains.size() < 2) throw Error(ErrorCode::TooFewParties, "an audit needs at least 2 parties");
    std::vector<std::string> parties;
    for (const auto& c : chains) parties.push_back(c.owner());
    std::sort(parties.begin(), parties.end());
    if (std::adjacent_find(parties.begin(), parties.end()) != parties.end()) {
        throw Error(ErrorCode::InvalidArgument, "each party may contribute one chain");
    }

    const nlohmann::json session_doc{{"parties", parties}, {"predicate", predicate.description()}, {"seed", seed}};
    AuditTranscript t;
    t.session_id = "audit-" + sha256_hex(canonical_dump(session_doc)).substr(0, 16);
    t.parties = parties;
    t.predicate = predicate.description();

    std::map<std::string, std::vector<FieldElement>> inputs;
    for (const auto& c : chains) inputs[c.owner()].push_back(encode_amount(private_aggregate(c, predicate)));
    const FieldElement aggregate = secure_sum(inputs, seed);
    t.opened_values.push_back(OpenedValue{"aggregate", aggregate});

    const std::int64_t value = decode_amount(aggregate);
    t.pass = predicate.kind == AuditPredicate::Kind::NetBalanceZero ? value == 0 : value < predicate.limit;
    return t;
}

nlohmann::json to_json(const AuditTranscript& t) {
    nlohmann::json opened = nlohmann::json::array();
    for (const auto& v : t.opened_values) {
        opened.push_back({{"name", v.name}, {"value", v.value.value}, {"signed_value", decode_amount(v.value)}});
    }
    return nlohmann::json{{"session_id", t.session_id},
                          {"parties", t.parties},
                          {"opened_values", opened},
                          {"verdict", t.verdict()},
                          {"predicate", t.predicate}};
}

AuditTranscript transcript_from_json(const nlohmann::json& j) {
    try {
        AuditTranscript t;
        t.session_id = j.at("session_id").get<std::string>();
        t.parties = j.at("parties").get<std::vector<std::string>>();
        for (const auto& v : j.at("opened_values")) {
            t.opened_values.push_back(
                OpenedValue{v.at("name").get<std::string>(), make_field_element(v.at("value").get<std::uint64_t>())});
        }
        const auto verdict = j.at("verdict").get<std::string>();
        if (verdict != "pass" && verdict != "fail") throw Error(ErrorCode::Parse, "verdict must be pass or fail");
        t.pass = verdict == "pass";
        t.predicate = j.at("predicate").get<std::string>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("transcript: ") + e.what());
    }
}

std::string canonical_transcript(const AuditTranscript& transcript) { return canonical_dump(to_json(transcript)); }

std::string transcript_hash(const AuditTranscript& transcript) {
    return sha256_hex(canonical_transcript(transcript));
}

TripleEntryRecord attestation_record(const AuditTranscript& transcript, const LedgerChain& target,
                                     const std::optional<std::string>& recorded_at) {
    std::string when = "1970-01-01T00:00:00Z";
    if (recorded_at) {
        when = normalize_rfc3339(*recorded_at);
    } else {
        std::int64_t latest = 0;
        bool any = false;
        for (const auto& r : target.records()) {
            const std::int64_t t = parse_rfc3339(r.metadata().occurred_at).epoch_seconds;
            if (!any || t > latest) latest = t;
            any = true;
        }
        if (any) when = format_rfc3339(Timestamp{latest});
    }

    TripleEntryRecord r;
    r.debits.push_back(EntryLeg{kAttestationDebitAccount, MonetaryAmount{0, kNoCurrency}});
    r.credits.push_back(EntryLeg{kAttestationCreditAccount, MonetaryAmount{0, kNoCurrency}});
    r.third.reference_key = transcript.session_id;
    ContextMetadata& m = r.third.metadata;
    m.party_from = kAuditParty;
    m.party_to = target.owner();
    m.occurred_at = when;
    m.tags = {"attestation", "verdict=" + transcript.verdict(), "transcript=" + transcript_hash(transcript)};
    m.rationale = "mpc audit " + transcript.predicate + ": " + transcript.verdict();
    return r;
}

LedgerChain emit_attestation(const AuditTranscript& transcript, LedgerChain target,
                             const std::optional<std::string>& recorded_at) {
    target.append(attestation_record(transcript, target, recorded_at));
    return target;
}

std::optional<Attestation> read_attestation(const TripleEntryRecord& record) {
    const auto& tags = record.metadata().tags;
    if (!tags.contains("attestation")) return std::nullopt;
    Attestation a;
    a.session_id = record.reference_key();
    a.recorded_at = record.metadata().occurred_at;
    for (const auto& tag : tags) {
        if (tag.starts_with("verdict=")) a.verdict = tag.substr(8);
        if (tag.starts_with("transcript=")) a.transcript_hash = tag.substr(11);
    }
    if (a.verdict.empty() || !is_hex64(a.transcript_hash)) return std::nullopt;
    return a;
}

}  // namespace tel
