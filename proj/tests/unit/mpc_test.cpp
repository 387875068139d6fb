#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "../support/fixtures.hpp"
#include "tel/error.hpp"
#include "tel/mpc.hpp"
#include "tel/rng.hpp"
#include "tel/sha256.hpp"

namespace tel {
namespace {

using testing::make_record;

template <typename F>
void expect_code(ErrorCode code, F&& f) {
    try {
        f();
        ADD_FAILURE() << "expected " << error_code_name(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

TEST(Field, Encoding) {
    EXPECT_EQ(encode_amount(42).value, 42u);
    EXPECT_EQ(encode_amount(-1).value, kFieldPrime - 1);
    EXPECT_EQ(decode_amount(encode_amount(-1)), -1);
    const auto bound = static_cast<std::int64_t>(kFieldPrime / 4);
    expect_code(ErrorCode::MagnitudeTooLarge, [&] { encode_amount(bound); });
    expect_code(ErrorCode::MagnitudeTooLarge, [&] { encode_amount(-bound); });
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const auto x = static_cast<std::int64_t>(rng.uniform_below(2 * static_cast<std::uint64_t>(bound) - 1)) - (bound - 1);
        EXPECT_EQ(decode_amount(encode_amount(x)), x);
    }
    EXPECT_EQ(decode_amount(encode_amount(bound - 1)), bound - 1);
    EXPECT_EQ(decode_amount(encode_amount(-(bound - 1))), -(bound - 1));
}

TEST(Sharing, ForcedFirstShare) {
    const auto shares = share_secret(FieldElement{42}, 2, [] { return FieldElement{10}; });
    ASSERT_EQ(shares.size(), 2u);
    EXPECT_EQ(shares[0].value.value, 10u);
    EXPECT_EQ(shares[1].value.value, 32u);
}

TEST(Sharing, SumsToSecretAndRoundTrips) {
    Rng rng(2);
    for (int i = 0; i < 10000; ++i) {
        const FieldElement x{rng.uniform_below(kFieldPrime)};
        const std::size_t n = 2 + rng.uniform_below(6);
        const auto shares = share_secret(x, n, rng.next_u64(), "s");
        unsigned __int128 sum = 0;
        for (const auto& s : shares) {
            EXPECT_LT(s.value.value, kFieldPrime);
            sum += s.value.value;
        }
        EXPECT_EQ(static_cast<std::uint64_t>(sum % kFieldPrime), x.value);
        EXPECT_EQ(reconstruct_secret(shares, n), x);
    }
    EXPECT_EQ(reconstruct_secret(share_secret(FieldElement{0}, 3, 7), 3).value, 0u);
}

TEST(Sharing, Errors) {
    expect_code(ErrorCode::TooFewParties, [] { share_secret(FieldElement{1}, 1, 0); });
    auto shares = share_secret(FieldElement{5}, 3, 1, "s1");
    auto partial = shares;
    partial.pop_back();
    expect_code(ErrorCode::IncompleteShareSet, [&] { reconstruct_secret(partial, 3); });
    auto duplicated = partial;
    duplicated.push_back(partial[0]);
    expect_code(ErrorCode::IncompleteShareSet, [&] { reconstruct_secret(duplicated, 3); });
    shares[1].session_id = "s2";
    expect_code(ErrorCode::MixedSessions, [&] { reconstruct_secret(shares, 3); });
    expect_code(ErrorCode::InvalidArgument, [] { make_field_element(kFieldPrime); });
}

// Pearson chi-square over the low 16 bits of every non-final share.
TEST(Sharing, NonFinalSharesLookUniform) {
    constexpr std::size_t kSharings = 100000;
    constexpr std::size_t kParties = 3;
    constexpr std::size_t kBins = 1u << 16;
    std::vector<std::vector<std::uint32_t>> hist(kParties - 1, std::vector<std::uint32_t>(kBins));
    Rng seeds(3);
    for (std::size_t i = 0; i < kSharings; ++i) {
        const auto shares = share_secret(FieldElement{123456789}, kParties, seeds.next_u64());
        for (std::size_t p = 0; p + 1 < kParties; ++p) ++hist[p][shares[p].value.value & 0xffff];
    }
    const double expected = static_cast<double>(kSharings) / kBins;
    const boost::math::chi_squared dist(static_cast<double>(kBins - 1));
    const double critical = boost::math::quantile(boost::math::complement(dist, 0.001));
    for (const auto& h : hist) {
        double stat = 0.0;
        for (std::uint32_t c : h) stat += (c - expected) * (c - expected) / expected;
        EXPECT_LT(stat, critical);
    }
}

TEST(SecureSum, Examples) {
    EXPECT_EQ(secure_sum({{"a", {FieldElement{100}}}, {"b", {FieldElement{250}}}}, 1).value, 350u);
    expect_code(ErrorCode::TooFewParties, [] { secure_sum({}, 1); });
    expect_code(ErrorCode::TooFewParties, [] { secure_sum({{"a", {FieldElement{1}}}}, 1); });

    Rng rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        std::map<std::string, std::vector<FieldElement>> inputs;
        std::int64_t plain = 0;
        const std::size_t parties = 3 + rng.uniform_below(3);
        for (std::size_t p = 0; p < parties; ++p) {
            auto& v = inputs["party" + std::to_string(p)];
            for (std::size_t k = 0; k < 1 + rng.uniform_below(5); ++k) {
                const auto x = static_cast<std::int64_t>(rng.uniform_below(2'000'000'000)) - 1'000'000'000;
                plain += x;
                v.push_back(encode_amount(x));
            }
        }
        EXPECT_EQ(decode_amount(secure_sum(inputs, rng.next_u64())), plain);
    }
}

// Owner-side chains of a bilateral relationship: both hold every record.
std::pair<LedgerChain, LedgerChain> mirrored_chains() {
    LedgerChain a("alice");
    LedgerChain b("bob");
    for (const auto& r : {make_record("T1", "alice", "bob", 1000), make_record("T2", "bob", "alice", 400),
                          make_record("T3", "alice", "bob", 250)}) {
        a.append(r);
        b.append(r);
    }
    return {a, b};
}

TEST(Audit, BalancedChainsPass) {
    auto [a, b] = mirrored_chains();
    const auto t = run_compliance_audit({a, b}, parse_predicate("net_balance_zero"), 7);
    EXPECT_TRUE(t.pass);
    ASSERT_EQ(t.opened_values.size(), 1u);
    EXPECT_EQ(t.opened_values[0].value.value, 0u);
    EXPECT_EQ(t.parties, (std::vector<std::string>{"alice", "bob"}));
}

TEST(Audit, InjectedImbalanceFails) {
    auto [a, b] = mirrored_chains();
    a.append(make_record("X1", "bob", "alice", 50));  // never booked by bob
    const auto t = run_compliance_audit({a, b}, parse_predicate("net_balance_zero"), 7);
    EXPECT_FALSE(t.pass);
    EXPECT_EQ(decode_amount(t.opened_values[0].value), 50);
    const std::string text = canonical_transcript(t);
    EXPECT_EQ(text.find("\"alice\":"), std::string::npos);
    EXPECT_EQ(text.find("\"bob\":"), std::string::npos);
}

TEST(Audit, ThresholdPredicate) {
    auto [a, b] = mirrored_chains();
    // Gross outflow: alice 1250, bob 400.
    EXPECT_TRUE(run_compliance_audit({a, b}, parse_predicate("aggregate_below_threshold(1651)"), 1).pass);
    EXPECT_FALSE(run_compliance_audit({a, b}, parse_predicate("aggregate_below_threshold", 1650), 1).pass);
    expect_code(ErrorCode::UnknownPredicate, [] { parse_predicate("max_exposure"); });
    expect_code(ErrorCode::UnknownPredicate, [] { parse_predicate("aggregate_below_threshold"); });
    expect_code(ErrorCode::TooFewParties, [&] { run_compliance_audit({a}, parse_predicate("net_balance_zero"), 1); });
}

TEST(Audit, TranscriptHidesPartyValues) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<LedgerChain> chains;
        std::vector<std::int64_t> privates;
        const std::size_t parties = 2 + rng.uniform_below(4);
        for (std::size_t p = 0; p < parties; ++p) {
            LedgerChain c("org" + std::to_string(p));
            // Nine-digit amounts, so the decimal text of a private value is distinctive.
            const auto amount = static_cast<std::int64_t>(100'000'000 + rng.uniform_below(800'000'000));
            c.append(make_record("in" + std::to_string(p), "external", c.owner(), amount));
            chains.push_back(std::move(c));
            privates.push_back(amount);
        }
        const auto predicate = parse_predicate("net_balance_zero");
        const auto t = run_compliance_audit(chains, predicate, rng.next_u64());
        std::int64_t sum = 0;
        for (std::size_t p = 0; p < parties; ++p) {
            EXPECT_EQ(private_aggregate(chains[p], predicate), privates[p]);
            sum += privates[p];
        }
        EXPECT_EQ(decode_amount(t.opened_values[0].value), sum);
        const std::string text = canonical_transcript(t);
        for (std::int64_t v : privates) {
            ASSERT_NE(v, sum);
            EXPECT_EQ(text.find(std::to_string(v)), std::string::npos) << text;
        }
    }
}

TEST(Audit, TranscriptJsonRoundTrip) {
    auto [a, b] = mirrored_chains();
    const auto t = run_compliance_audit({a, b}, parse_predicate("net_balance_zero"), 3);
    const auto back = transcript_from_json(nlohmann::json::parse(canonical_transcript(t)));
    EXPECT_EQ(transcript_hash(back), transcript_hash(t));
    EXPECT_TRUE(is_hex64(transcript_hash(t)));
    EXPECT_EQ(run_compliance_audit({a, b}, parse_predicate("net_balance_zero"), 3).session_id, t.session_id);
    EXPECT_NE(run_compliance_audit({a, b}, parse_predicate("net_balance_zero"), 4).session_id, t.session_id);
}

TEST(Attestation, AppendsVerifiableRecord) {
    auto [a, b] = mirrored_chains();
    const auto t = run_compliance_audit({a, b}, parse_predicate("net_balance_zero"), 9);
    const LedgerChain attested = emit_attestation(t, a);
    EXPECT_EQ(attested.size(), a.size() + 1);
    EXPECT_TRUE(verify_chain(attested).ok);
    const auto& rec = attested.records().back();
    EXPECT_EQ(rec.reference_key(), t.session_id);
    EXPECT_EQ(rec.metadata().occurred_at, "2024-01-01T12:00:00Z");
    const auto info = read_attestation(rec);
    ASSERT_TRUE(info.has_value());
    EXPECT_EQ(info->verdict, "pass");
    EXPECT_EQ(info->transcript_hash, transcript_hash(t));
    EXPECT_EQ(rec.total(), 0);
    try {
        emit_attestation(t, attested);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateReferenceKey);
    }
    const auto stamped = emit_attestation(t, a, std::string("2024-06-30T10:00:00+02:00"));
    EXPECT_EQ(stamped.records().back().metadata().occurred_at, "2024-06-30T08:00:00Z");
}

}  // namespace
}  // namespace tel
