#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/tel.h"

namespace {

using json = nlohmann::json;

json record(const std::string& key, const std::string& from, const std::string& to, std::int64_t amount,
            const std::string& when = "2024-03-01T09:00:00Z") {
    return json{{"debits", {{{"account", "assets:" + to}, {"amount", {{"currency", "EUR"}, {"minor_units", amount}}}}}},
                {"credits", {{{"account", "assets:" + from}, {"amount", {{"currency", "EUR"}, {"minor_units", amount}}}}}},
                {"third",
                 {{"reference_key", key},
                  {"metadata", {{"party_from", from}, {"party_to", to}, {"occurred_at", when}, {"tags", json::array()}}},
                  {"prev_record_hash", std::string(64, '0')},
                  {"record_hash", ""}}}};
}

std::string take(char* s) {
    std::string out(s);
    tel_string_free(s);
    return out;
}

struct LedgerGuard {
    tel_ledger* l = nullptr;
    ~LedgerGuard() { tel_ledger_free(l); }
};

TEST(CApi, AppendVerifyAndRead) {
    LedgerGuard g;
    ASSERT_EQ(tel_ledger_create("alice", &g.l), TEL_OK);
    char* stored = nullptr;
    ASSERT_EQ(tel_ledger_append_json(g.l, record("K1", "alice", "bob", 500).dump().c_str(), &stored), TEL_OK);
    const json first = json::parse(take(stored));
    EXPECT_EQ(first["third"]["prev_record_hash"], std::string(64, '0'));
    ASSERT_EQ(tel_ledger_append_json(g.l, record("K2", "bob", "alice", 70).dump().c_str(), nullptr), TEL_OK);

    size_t n = 0;
    ASSERT_EQ(tel_ledger_size(g.l, &n), TEL_OK);
    EXPECT_EQ(n, 2u);
    char* out = nullptr;
    ASSERT_EQ(tel_ledger_record_json(g.l, 1, &out), TEL_OK);
    EXPECT_EQ(json::parse(take(out))["third"]["prev_record_hash"], first["third"]["record_hash"]);

    ASSERT_EQ(tel_ledger_verify(g.l, &out), TEL_OK);
    EXPECT_TRUE(json::parse(take(out))["ok"].get<bool>());

    char* hex = nullptr;
    ASSERT_EQ(tel_record_hash(first.dump().c_str(), &hex), TEL_OK);
    EXPECT_EQ(take(hex), first["third"]["record_hash"]);
}

TEST(CApi, ErrorCodesAndMessages) {
    LedgerGuard g;
    ASSERT_EQ(tel_ledger_create(nullptr, &g.l), TEL_OK);
    json bad = record("K1", "a", "b", 100);
    bad["credits"][0]["amount"]["minor_units"] = 99;
    EXPECT_EQ(tel_ledger_append_json(g.l, bad.dump().c_str(), nullptr), TEL_E_UNBALANCED_RECORD);
    EXPECT_NE(std::strlen(tel_last_error()), 0u);
    EXPECT_STREQ(tel_status_name(TEL_E_UNBALANCED_RECORD), "UnbalancedRecord");

    ASSERT_EQ(tel_ledger_append_json(g.l, record("K1", "a", "b", 100).dump().c_str(), nullptr), TEL_OK);
    EXPECT_EQ(tel_ledger_append_json(g.l, record("K1", "a", "b", 100).dump().c_str(), nullptr),
              TEL_E_DUPLICATE_REFERENCE_KEY);
    EXPECT_EQ(tel_ledger_append_json(g.l, "{not json", nullptr), TEL_E_PARSE);
    EXPECT_EQ(tel_ledger_append_json(nullptr, "{}", nullptr), TEL_E_INVALID_ARGUMENT);
    char* out = nullptr;
    EXPECT_EQ(tel_ledger_record_json(g.l, 5, &out), TEL_E_INVALID_ARGUMENT);
    tel_ledger* missing = nullptr;
    EXPECT_EQ(tel_ledger_load("/nonexistent/ledger.jsonl", "x", &missing), TEL_E_SOURCE_UNREADABLE);
    EXPECT_EQ(missing, nullptr);
}

TEST(CApi, SaveLoadAndPartyView) {
    const auto path = std::filesystem::temp_directory_path() / "tel_capi_save.jsonl";
    LedgerGuard g;
    ASSERT_EQ(tel_ledger_create("shared", &g.l), TEL_OK);
    tel_ledger_append_json(g.l, record("K1", "a", "b", 1).dump().c_str(), nullptr);
    tel_ledger_append_json(g.l, record("K2", "b", "c", 2).dump().c_str(), nullptr);
    tel_ledger_append_json(g.l, record("K3", "c", "a", 3).dump().c_str(), nullptr);
    ASSERT_EQ(tel_ledger_save(g.l, path.c_str()), TEL_OK);

    LedgerGuard loaded;
    ASSERT_EQ(tel_ledger_load(path.c_str(), "b", &loaded.l), TEL_OK);
    char* owner = nullptr;
    ASSERT_EQ(tel_ledger_owner(loaded.l, &owner), TEL_OK);
    EXPECT_EQ(take(owner), "b");
    LedgerGuard view;
    ASSERT_EQ(tel_ledger_party_view(loaded.l, "b", &view.l), TEL_OK);
    size_t n = 0;
    tel_ledger_size(view.l, &n);
    EXPECT_EQ(n, 2u);
    char* file_hex = nullptr;
    ASSERT_EQ(tel_sha256_file(path.c_str(), &file_hex), TEL_OK);
    EXPECT_EQ(take(file_hex).size(), 64u);
    std::filesystem::remove(path);
}

TEST(CApi, ConcurrentAppendsAndReads) {
    LedgerGuard g;
    ASSERT_EQ(tel_ledger_create("shared", &g.l), TEL_OK);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) {
                const auto key = "T" + std::to_string(t) + "-" + std::to_string(i);
                EXPECT_EQ(tel_ledger_append_json(g.l, record(key, "a", "b", 1 + i).dump().c_str(), nullptr), TEL_OK);
                char* report = nullptr;
                EXPECT_EQ(tel_ledger_verify(g.l, &report), TEL_OK);
                EXPECT_TRUE(json::parse(take(report))["ok"].get<bool>());
            }
        });
    }
    for (auto& th : threads) th.join();
    size_t n = 0;
    tel_ledger_size(g.l, &n);
    EXPECT_EQ(n, 200u);
}

TEST(CApi, SchemaEncodeDetectMine) {
    LedgerGuard g;
    ASSERT_EQ(tel_ledger_create("shared", &g.l), TEL_OK);
    for (int i = 0; i < 30; ++i) {
        tel_ledger_append_json(g.l, record("K" + std::to_string(i), i % 2 ? "a" : "b", "c", 100 + i).dump().c_str(),
                               nullptr);
    }
    tel_schema* schema = nullptr;
    ASSERT_EQ(tel_schema_fit(g.l, nullptr, &schema), TEL_OK);
    char* s = nullptr;
    ASSERT_EQ(tel_schema_to_json(schema, &s), TEL_OK);
    const std::string schema_text = take(s);
    tel_schema* again = nullptr;
    ASSERT_EQ(tel_schema_from_json(schema_text.c_str(), &again), TEL_OK);

    char* m1 = nullptr;
    char* m2 = nullptr;
    ASSERT_EQ(tel_encode(g.l, schema, &m1), TEL_OK);
    ASSERT_EQ(tel_encode(g.l, again, &m2), TEL_OK);
    EXPECT_EQ(take(m1), take(m2));

    ASSERT_EQ(tel_detect(g.l, schema, R"({"method":"iforest","seed":42})", &s), TEL_OK);
    EXPECT_EQ(json::parse(take(s))["scores"].size(), 30u);
    EXPECT_EQ(tel_detect(g.l, schema, R"({"method":"iforest","sead":42})", &s), TEL_E_INVALID_ARGUMENT);
    EXPECT_EQ(tel_detect(g.l, schema, R"({"method":"lof","k":40})", &s), TEL_E_K_OUT_OF_RANGE);

    ASSERT_EQ(tel_mine(g.l, R"({"method":"eclat","min_support":0.3})", &s), TEL_OK);
    EXPECT_TRUE(json::parse(take(s))["rules"].is_array());
    EXPECT_EQ(tel_mine(g.l, R"({"min_support":0})", &s), TEL_E_SUPPORT_OUT_OF_RANGE);
    tel_schema_free(schema);
    tel_schema_free(again);
}

TEST(CApi, AuditAndAttest) {
    LedgerGuard a, b;
    ASSERT_EQ(tel_ledger_create("a", &a.l), TEL_OK);
    ASSERT_EQ(tel_ledger_create("b", &b.l), TEL_OK);
    for (auto* l : {a.l, b.l}) {
        tel_ledger_append_json(l, record("K1", "a", "b", 300).dump().c_str(), nullptr);
        tel_ledger_append_json(l, record("K2", "b", "a", 100).dump().c_str(), nullptr);
    }
    const tel_ledger* chains[] = {a.l, b.l};
    char* t = nullptr;
    ASSERT_EQ(tel_audit_mpc(chains, 2, "net_balance_zero", 5, &t), TEL_OK);
    const std::string transcript = take(t);
    EXPECT_EQ(json::parse(transcript)["verdict"], "pass");
    EXPECT_EQ(tel_audit_mpc(chains, 1, "net_balance_zero", 5, &t), TEL_E_TOO_FEW_PARTIES);
    EXPECT_EQ(tel_audit_mpc(chains, 2, "solvency", 5, &t), TEL_E_UNKNOWN_PREDICATE);

    char* rec = nullptr;
    ASSERT_EQ(tel_attest(a.l, transcript.c_str(), nullptr, &rec), TEL_OK);
    const json attested = json::parse(take(rec));
    char* hex = nullptr;
    ASSERT_EQ(tel_transcript_hash(transcript.c_str(), &hex), TEL_OK);
    const auto tags = attested["third"]["metadata"]["tags"];
    EXPECT_NE(std::find(tags.begin(), tags.end(), "transcript=" + take(hex)), tags.end());
    char* report = nullptr;
    ASSERT_EQ(tel_ledger_verify(a.l, &report), TEL_OK);
    EXPECT_TRUE(json::parse(take(report))["ok"].get<bool>());
    EXPECT_EQ(tel_attest(a.l, transcript.c_str(), nullptr, &rec), TEL_E_DUPLICATE_REFERENCE_KEY);
}

}  // namespace
