#include <gtest/gtest.h>

#include <sstream>

#include "../support/fixtures.hpp"
#include "tel/error.hpp"
#include "tel/ledger.hpp"
#include "tel/sha256.hpp"
#include "tel/timestamp.hpp"

namespace tel {
namespace {

using testing::make_record;
using testing::random_chain;
using testing::random_record;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected tel::Error";
    return ErrorCode::InvalidArgument;
}

TEST(Sha256, ReferenceVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(Timestamp, NormalizesOffsetsAndFractions) {
    EXPECT_EQ(normalize_rfc3339("2024-01-11T09:30:00Z"), "2024-01-11T09:30:00Z");
    EXPECT_EQ(normalize_rfc3339("2024-01-11T09:30:00.999+02:00"), "2024-01-11T07:30:00Z");
    EXPECT_EQ(normalize_rfc3339("2024-01-01T01:00:00+03:00"), "2023-12-31T22:00:00Z");
    EXPECT_EQ(normalize_rfc3339("2024-02-29t23:59:59z"), "2024-02-29T23:59:59Z");
    for (const char* bad : {"2024-02-30T00:00:00Z", "2023-02-29T00:00:00Z", "2024-01-01 00:00:00Z",
                            "2024-01-01T00:00:00", "2024-13-01T00:00:00Z", "yesterday", ""}) {
        EXPECT_EQ(code_of([&] { parse_rfc3339(bad); }), ErrorCode::UnparseableTimestamp) << bad;
    }
}

TEST(Timestamp, RoundTripsAcrossEpochs) {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const auto s = static_cast<std::int64_t>(rng.uniform_below(8'000'000'000ULL)) - 2'000'000'000LL;
        EXPECT_EQ(parse_rfc3339(format_rfc3339(Timestamp{s})).epoch_seconds, s);
    }
}

TEST(Canonicalize, KeysSortedCompactAndUtf8) {
    TripleEntryRecord r = make_record("T1", "A", "B", 500);
    r.third.metadata.item_description = "café";
    const std::string bytes = canonicalize_record(r);
    const auto credits = bytes.find("\"credits\"");
    const auto debits = bytes.find("\"debits\"");
    const auto third = bytes.find("\"third\"");
    ASSERT_NE(credits, std::string::npos);
    EXPECT_LT(credits, debits);
    EXPECT_LT(debits, third);
    EXPECT_EQ(bytes.find(' '), std::string::npos);
    EXPECT_NE(bytes.find("caf\xC3\xA9"), std::string::npos);
    EXPECT_EQ(bytes.find("\\u"), std::string::npos);
    EXPECT_NE(bytes.find("\"record_hash\":\"\""), std::string::npos);
    EXPECT_EQ(bytes,
              R"({"credits":[{"account":"assets:A","amount":{"currency":"USD","minor_units":500}}],)"
              R"("debits":[{"account":"assets:B","amount":{"currency":"USD","minor_units":500}}],)"
              R"("third":{"metadata":{"item_description":"caf)"
              "\xC3\xA9"
              R"(","occurred_at":"2024-01-01T12:00:00Z","party_from":"A","party_to":"B","tags":[]},)"
              R"("prev_record_hash":"0000000000000000000000000000000000000000000000000000000000000000",)"
              R"("record_hash":"","reference_key":"T1"}})");
}

TEST(Canonicalize, InsertionOrderDoesNotMatter) {
    TripleEntryRecord r = make_record("T1", "A", "B", 500);
    const auto j = record_to_json(r);
    // Rebuild the object with keys inserted in reverse order.
    nlohmann::json reversed = nlohmann::json::object();
    for (auto it = j.items().begin(); it != j.items().end(); ++it) reversed[it.key()] = it.value();
    EXPECT_EQ(canonicalize_record(record_from_json(reversed)), canonicalize_record(r));
    EXPECT_EQ(canonicalize_record(record_from_json(nlohmann::json::parse(j.dump(2)))), canonicalize_record(r));
}

TEST(Canonicalize, RejectsInvariantViolations) {
    auto bad_currency = make_record("T1", "A", "B", 500, "usd");
    EXPECT_EQ(code_of([&] { canonicalize_record(bad_currency); }), ErrorCode::InvalidRecord);
    auto same_party = make_record("T1", "A", "A", 500);
    EXPECT_EQ(code_of([&] { canonicalize_record(same_party); }), ErrorCode::InvalidRecord);
    auto unbalanced = make_record("T1", "A", "B", 500);
    unbalanced.credits[0].amount.minor_units = 499;
    EXPECT_EQ(code_of([&] { canonicalize_record(unbalanced); }), ErrorCode::InvalidRecord);
    auto huge = make_record("T1", "A", "B", kMaxMinorUnits + 1);
    EXPECT_EQ(code_of([&] { canonicalize_record(huge); }), ErrorCode::InvalidRecord);
    auto zero = make_record("T1", "A", "B", 0);
    EXPECT_EQ(code_of([&] { canonicalize_record(zero); }), ErrorCode::InvalidRecord);
    auto attestation_zero = make_record("T1", "A", "B", 0, kNoCurrency);
    EXPECT_NO_THROW(canonicalize_record(attestation_zero));
    auto bad_time = make_record("T1", "A", "B", 5, "USD", "2024-01-01T12:00:00+01:00");
    EXPECT_EQ(code_of([&] { canonicalize_record(bad_time); }), ErrorCode::InvalidRecord);
    auto no_key = make_record("", "A", "B", 5);
    EXPECT_EQ(code_of([&] { canonicalize_record(no_key); }), ErrorCode::InvalidRecord);
}

TEST(Canonicalize, InjectiveOverRandomDistinctPairs) {
    Rng rng(11);
    for (int i = 0; i < 5000; ++i) {
        const auto a = random_record(rng, "K" + std::to_string(rng.uniform_below(4)));
        const auto b = random_record(rng, "K" + std::to_string(rng.uniform_below(4)));
        if (a == b) continue;
        EXPECT_NE(canonicalize_record(a), canonicalize_record(b));
    }
}

TEST(RecordHash, DeterministicAndSensitive) {
    auto r = make_record("T1", "A", "B", 500);
    r.third.metadata.location = "NY";
    const std::string h = compute_record_hash(r);
    EXPECT_TRUE(is_hex64(h));
    EXPECT_EQ(compute_record_hash(r), h);
    EXPECT_EQ(h, sha256_hex(canonicalize_record(r)));
    r.third.metadata.location = "NZ";
    EXPECT_NE(compute_record_hash(r), h);
    EXPECT_EQ(compute_record_hash(r), sha256_hex(canonicalize_record(r)));
}

TEST(BalanceCheck, Examples) {
    auto r = make_record("T1", "A", "B", 500);
    EXPECT_TRUE(balance_check(r).pass);
    EXPECT_EQ(balance_check(r).imbalance, 0);

    r.debits = {{"x", {300, "USD"}}, {"y", {200, "USD"}}};
    EXPECT_TRUE(balance_check(r).pass);

    r.debits = {{"x", {500, "USD"}}};
    r.credits = {{"y", {499, "USD"}}};
    EXPECT_FALSE(balance_check(r).pass);
    EXPECT_EQ(balance_check(r).imbalance, 1);

    r.credits = {{"y", {500, "EUR"}}};
    EXPECT_EQ(code_of([&] { balance_check(r); }), ErrorCode::CurrencyMismatch);
}

TEST(Append, GenesisAndLinks) {
    LedgerChain chain("A");
    const auto& first = chain.append(make_record("T1", "A", "B", 500));
    EXPECT_EQ(first.third.prev_record_hash, std::string(64, '0'));
    EXPECT_EQ(first.third.record_hash, compute_record_hash(first));
    chain.append(make_record("T2", "B", "C", 100));
    chain.append(make_record("T3", "A", "C", 7));
    EXPECT_EQ(chain[1].third.prev_record_hash, chain[0].third.record_hash);
    EXPECT_EQ(chain[2].third.prev_record_hash, chain[1].third.record_hash);
    EXPECT_TRUE(verify_chain(chain).ok);
}

TEST(Append, ErrorPaths) {
    LedgerChain chain;
    chain.append(make_record("T1", "A", "B", 500));
    EXPECT_EQ(code_of([&] { chain.append(make_record("T1", "B", "C", 5)); }), ErrorCode::DuplicateReferenceKey);
    auto unbalanced = make_record("T2", "A", "B", 500);
    unbalanced.credits[0].amount.minor_units = 450;
    EXPECT_EQ(code_of([&] { chain.append(unbalanced); }), ErrorCode::UnbalancedRecord);
    auto mixed = make_record("T3", "A", "B", 500);
    mixed.credits[0].amount.currency = "EUR";
    EXPECT_EQ(code_of([&] { chain.append(mixed); }), ErrorCode::CurrencyMismatch);
    EXPECT_EQ(chain.size(), 1u);
}

TEST(Append, NormalizesTimestampBeforeHashing) {
    LedgerChain chain;
    const auto& r = chain.append(make_record("T1", "A", "B", 5, "USD", "2024-01-01T12:00:00.5+01:00"));
    EXPECT_EQ(r.metadata().occurred_at, "2024-01-01T11:00:00Z");
    EXPECT_TRUE(verify_chain(chain).ok);
}

TEST(Append, FunctionalFormLeavesPrefixUntouched) {
    Rng rng(5);
    LedgerChain chain = random_chain(rng, 20);
    const auto before = chain.records();
    LedgerChain longer = append_record(chain, random_record(rng, "NEW"));
    EXPECT_EQ(longer.size(), 21u);
    EXPECT_EQ(chain.records(), before);
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(longer[i], before[i]);
}

TEST(Verify, EmptyAndUntampered) {
    EXPECT_TRUE(verify_chain(LedgerChain{}).ok);
    Rng rng(3);
    const LedgerChain chain = random_chain(rng, 5);
    const auto report = verify_chain(chain);
    EXPECT_TRUE(report.ok);
    EXPECT_FALSE(report.failing_index.has_value());
}

TEST(Verify, MetadataByteFlipReportsIndex) {
    Rng rng(3);
    LedgerChain chain = random_chain(rng, 5);
    chain.mutable_records_for_testing()[2].third.metadata.party_from[0] ^= 0x01;
    const auto report = verify_chain(chain);
    EXPECT_FALSE(report.ok);
    ASSERT_TRUE(report.failing_index.has_value());
    EXPECT_EQ(*report.failing_index, 2u);
    EXPECT_EQ(report.reason, "hash mismatch");
}

TEST(Verify, ResealedRecordBreaksLink) {
    Rng rng(4);
    LedgerChain chain = random_chain(rng, 4);
    auto& r = chain.mutable_records_for_testing()[1];
    r.third.metadata.rationale = "rewritten";
    r.third.record_hash = compute_record_hash(r);
    const auto report = verify_chain(chain);
    ASSERT_FALSE(report.ok);
    EXPECT_EQ(*report.failing_index, 2u);
    EXPECT_EQ(report.reason, "broken link");
}

TEST(Verify, PropertyAnySingleByteMutationIsLocated) {
    Rng rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        LedgerChain chain = random_chain(rng, 1 + rng.uniform_below(100));
        ASSERT_TRUE(verify_chain(chain).ok);
        const std::size_t index = rng.uniform_below(chain.size());
        const std::string field = testing::mutate_one_byte(chain.mutable_records_for_testing()[index], rng);
        const auto report = verify_chain(chain);
        ASSERT_FALSE(report.ok) << field;
        EXPECT_EQ(*report.failing_index, index) << field;
    }
}

TEST(PartyView, Examples) {
    LedgerChain chain;
    chain.append(make_record("T1", "A", "B", 5));
    chain.append(make_record("T2", "B", "C", 6));
    const auto view_a = derive_party_view(chain, "A");
    ASSERT_EQ(view_a.size(), 1u);
    EXPECT_EQ(view_a[0].reference_key(), "T1");
    EXPECT_TRUE(derive_party_view(chain, "Z").empty());
    const auto view_c = derive_party_view(chain, "C");
    std::set<std::size_t> covered(view_a.indices().begin(), view_a.indices().end());
    covered.insert(view_c.indices().begin(), view_c.indices().end());
    EXPECT_EQ(covered.size(), chain.size());
}

TEST(PartyView, AlwaysOrderedSubsequence) {
    Rng rng(9);
    const LedgerChain chain = random_chain(rng, 60);
    for (const char* party : {"A", "B", "C", "D", "E", "Q"}) {
        const auto view = derive_party_view(chain, party);
        for (std::size_t i = 1; i < view.size(); ++i) EXPECT_LT(view.indices()[i - 1], view.indices()[i]);
        for (std::size_t i = 0; i < view.size(); ++i) EXPECT_EQ(view[i], chain[view.indices()[i]]);
        const auto copy = view.materialize();
        EXPECT_EQ(copy.owner(), party);
        EXPECT_EQ(copy.size(), view.size());
    }
}

TEST(Jsonl, RoundTripPreservesChain) {
    Rng rng(12);
    const LedgerChain chain = random_chain(rng, 30, "A");
    std::stringstream buffer;
    write_jsonl(chain, buffer);
    const std::string text = buffer.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 30);
    const LedgerChain loaded = read_jsonl(buffer, "A");
    EXPECT_EQ(loaded.records(), chain.records());
    EXPECT_TRUE(verify_chain(loaded).ok);
}

TEST(Jsonl, MalformedLineNamesLineNumber) {
    std::stringstream in;
    LedgerChain chain;
    chain.append(make_record("T1", "A", "B", 5));
    write_jsonl(chain, in);
    in << "{not json}\n";
    try {
        read_jsonl(in, "A");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Parse);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

}  // namespace
}  // namespace tel
