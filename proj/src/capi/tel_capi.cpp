#include "tel/tel.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <optional>
#include <shared_mutex>
#include <string>

#include "tel/error.hpp"
#include "tel/features.hpp"
#include "tel/ingest.hpp"
#include "tel/ledger.hpp"
#include "tel/mpc.hpp"
#include "tel/pipeline.hpp"
#include "tel/reconcile.hpp"
#include "tel/settlement.hpp"
#include "tel/sha256.hpp"

struct tel_ledger {
    tel::LedgerChain chain;
    mutable std::shared_mutex mutex;

    explicit tel_ledger(tel::LedgerChain c) : chain(std::move(c)) {}
};

struct tel_schema {
    tel::FeatureSchema schema;
};

namespace {

using json = nlohmann::json;

thread_local std::string last_error;

tel_status fail(tel_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

// Runs f, mapping every exception onto a status and the thread's last error.
template <typename F>
tel_status guarded(F&& f) noexcept {
    try {
        last_error.clear();
        f();
        return TEL_OK;
    } catch (const tel::Error& e) {
        return fail(static_cast<tel_status>(e.code()), e.what());
    } catch (const json::exception& e) {
        return fail(TEL_E_PARSE, std::string("Parse: ") + e.what());
    } catch (const std::bad_alloc&) {
        return fail(TEL_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(TEL_E_INTERNAL, e.what());
    } catch (...) {
        return fail(TEL_E_INTERNAL, "unknown failure");
    }
}

void require(bool condition, const char* what) {
    if (!condition) throw tel::Error(tel::ErrorCode::InvalidArgument, what);
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void emit(char** out, const json& j) {
    if (out != nullptr) *out = dup(j.dump(-1, ' ', false, json::error_handler_t::replace));
}

json parse_or(const char* text, json fallback) {
    if (text == nullptr || *text == '\0') return fallback;
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw tel::Error(tel::ErrorCode::Parse, e.what());
    }
}

json verification_json(const tel::VerificationReport& r) {
    return json{{"ok", r.ok},
                {"failing_index", r.failing_index ? json(*r.failing_index) : json(nullptr)},
                {"reason", r.reason}};
}

}  // namespace

extern "C" {

const char* tel_version(void) { return "1.0.0"; }

const char* tel_status_name(tel_status status) {
    if (status == TEL_OK) return "Ok";
    if (status == TEL_E_INTERNAL) return "Internal";
    if (status >= TEL_E_INVALID_ARGUMENT && status <= TEL_E_PARSE) {
        return tel::error_code_name(static_cast<tel::ErrorCode>(status)).data();
    }
    return "Unknown";
}

const char* tel_last_error(void) { return last_error.c_str(); }

void tel_string_free(char* s) { std::free(s); }

tel_status tel_ledger_create(const char* owner, tel_ledger** out) {
    return guarded([&] {
        require(out != nullptr, "out is NULL");
        *out = new tel_ledger(tel::LedgerChain(owner ? owner : tel::kSharedOwner));
    });
}

tel_status tel_ledger_load(const char* path, const char* owner, tel_ledger** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path and out are required");
        *out = new tel_ledger(tel::load_jsonl(path, owner ? owner : tel::kSharedOwner));
    });
}

tel_status tel_ledger_save(const tel_ledger* ledger, const char* path) {
    return guarded([&] {
        require(ledger != nullptr && path != nullptr, "ledger and path are required");
        std::shared_lock lock(ledger->mutex);
        tel::save_jsonl(ledger->chain, path);
    });
}

void tel_ledger_free(tel_ledger* ledger) { delete ledger; }

tel_status tel_ledger_owner(const tel_ledger* ledger, char** out) {
    return guarded([&] {
        require(ledger != nullptr && out != nullptr, "ledger and out are required");
        std::shared_lock lock(ledger->mutex);
        *out = dup(ledger->chain.owner());
    });
}

tel_status tel_ledger_size(const tel_ledger* ledger, size_t* out) {
    return guarded([&] {
        require(ledger != nullptr && out != nullptr, "ledger and out are required");
        std::shared_lock lock(ledger->mutex);
        *out = ledger->chain.size();
    });
}

tel_status tel_ledger_append_json(tel_ledger* ledger, const char* record_json, char** stored) {
    return guarded([&] {
        require(ledger != nullptr && record_json != nullptr, "ledger and record are required");
        tel::TripleEntryRecord r = tel::record_from_json(parse_or(record_json, nullptr));
        std::unique_lock lock(ledger->mutex);
        const auto& appended = ledger->chain.append(std::move(r));
        emit(stored, tel::record_to_json(appended));
    });
}

tel_status tel_ledger_record_json(const tel_ledger* ledger, size_t index, char** out) {
    return guarded([&] {
        require(ledger != nullptr && out != nullptr, "ledger and out are required");
        std::shared_lock lock(ledger->mutex);
        require(index < ledger->chain.size(), "index out of range");
        emit(out, tel::record_to_json(ledger->chain[index]));
    });
}

tel_status tel_ledger_verify(const tel_ledger* ledger, char** report) {
    return guarded([&] {
        require(ledger != nullptr && report != nullptr, "ledger and report are required");
        std::shared_lock lock(ledger->mutex);
        emit(report, verification_json(tel::verify_chain(ledger->chain)));
    });
}

tel_status tel_ledger_party_view(const tel_ledger* ledger, const char* party, tel_ledger** out) {
    return guarded([&] {
        require(ledger != nullptr && party != nullptr && out != nullptr, "ledger, party and out are required");
        std::shared_lock lock(ledger->mutex);
        *out = new tel_ledger(tel::derive_party_view(ledger->chain, party).materialize());
    });
}

tel_status tel_record_hash(const char* record_json, char** hex) {
    return guarded([&] {
        require(record_json != nullptr && hex != nullptr, "record and out are required");
        *hex = dup(tel::compute_record_hash(tel::record_from_json(parse_or(record_json, nullptr))));
    });
}

tel_status tel_sha256_file(const char* path, char** hex) {
    return guarded([&] {
        require(path != nullptr && hex != nullptr, "path and out are required");
        *hex = dup(tel::sha256_file_hex(path));
    });
}

tel_status tel_ingest_file(tel_ledger* ledger, const char* path, const char* options_json, char** report) {
    return guarded([&] {
        require(ledger != nullptr && path != nullptr, "ledger and path are required");
        const tel::IngestOptions options = tel::ingest_options_from_json(parse_or(options_json, json::object()));
        tel::IngestResult result = tel::ingest_file(path, options);

        // Rows whose key the ledger already holds are rejected like in-batch duplicates.
        std::unique_lock lock(ledger->mutex);
        tel::IngestReport merged;
        for (std::size_t i = 0; i < result.records.size(); ++i) {
            if (ledger->chain.contains_key(result.records[i].reference_key())) {
                merged.rejected.push_back({result.lines[i], "duplicate reference key"});
                continue;
            }
            ledger->chain.append(std::move(result.records[i]));
            ++merged.accepted;
        }
        merged.rejected.insert(merged.rejected.end(), result.report.rejected.begin(), result.report.rejected.end());
        std::sort(merged.rejected.begin(), merged.rejected.end(),
                  [](const tel::RejectedRow& a, const tel::RejectedRow& b) { return a.line < b.line; });
        emit(report, tel::to_json(merged));
    });
}

tel_status tel_reconcile(const tel_ledger* a, const tel_ledger* b, char** report) {
    return guarded([&] {
        require(a != nullptr && b != nullptr && report != nullptr, "ledgers and report are required");
        std::shared_lock la(a->mutex, std::defer_lock);
        std::shared_lock lb(b->mutex, std::defer_lock);
        if (a == b) {
            la.lock();
        } else {
            std::lock(la, lb);
        }
        emit(report, tel::to_json(tel::reconcile(a->chain, b->chain)));
    });
}

tel_status tel_settle(tel_ledger* ledger, const char* rules_json, char** appended) {
    return guarded([&] {
        require(ledger != nullptr && rules_json != nullptr, "ledger and rules are required");
        const auto rules = tel::rules_from_json(parse_or(rules_json, nullptr));
        std::unique_lock lock(ledger->mutex);
        const auto produced = tel::evaluate_settlement_rules(ledger->chain, rules);
        json out = json::array();
        for (const auto& r : produced) out.push_back(tel::record_to_json(ledger->chain.append(r)));
        emit(appended, out);
    });
}

tel_status tel_schema_fit(const tel_ledger* ledger, const char* config_json, tel_schema** out) {
    return guarded([&] {
        require(ledger != nullptr && out != nullptr, "ledger and out are required");
        const json config = parse_or(config_json, nullptr);
        const tel::FeatureConfig fc =
            config.is_null() ? tel::FeatureConfig::defaults() : tel::feature_config_from_json(config);
        std::shared_lock lock(ledger->mutex);
        *out = new tel_schema{tel::fit_schema(ledger->chain.records(), fc)};
    });
}

tel_status tel_schema_to_json(const tel_schema* schema, char** out) {
    return guarded([&] {
        require(schema != nullptr && out != nullptr, "schema and out are required");
        emit(out, tel::to_json(schema->schema));
    });
}

tel_status tel_schema_from_json(const char* text, tel_schema** out) {
    return guarded([&] {
        require(text != nullptr && out != nullptr, "json and out are required");
        *out = new tel_schema{tel::schema_from_json(parse_or(text, nullptr))};
    });
}

void tel_schema_free(tel_schema* schema) { delete schema; }

tel_status tel_encode(const tel_ledger* ledger, const tel_schema* schema, char** matrix) {
    return guarded([&] {
        require(ledger != nullptr && schema != nullptr && matrix != nullptr, "ledger, schema and out are required");
        std::shared_lock lock(ledger->mutex);
        emit(matrix, tel::encode_records(ledger->chain.records(), schema->schema));
    });
}

tel_status tel_train(const tel_ledger* ledger, const tel_schema* schema, const char* options_json, char** result) {
    return guarded([&] {
        require(ledger != nullptr && schema != nullptr && result != nullptr, "ledger, schema and out are required");
        std::shared_lock lock(ledger->mutex);
        emit(result, tel::train_model(ledger->chain.records(), schema->schema, parse_or(options_json, nullptr)));
    });
}

tel_status tel_predict(const tel_ledger* ledger, const tel_schema* schema, const char* model_json, char** result) {
    return guarded([&] {
        require(ledger != nullptr && schema != nullptr && model_json != nullptr && result != nullptr,
                "ledger, schema, model and out are required");
        std::shared_lock lock(ledger->mutex);
        emit(result, tel::predict_model(ledger->chain.records(), schema->schema, parse_or(model_json, nullptr)));
    });
}

tel_status tel_detect(const tel_ledger* ledger, const tel_schema* schema, const char* options_json, char** result) {
    return guarded([&] {
        require(ledger != nullptr && schema != nullptr && result != nullptr, "ledger, schema and out are required");
        std::shared_lock lock(ledger->mutex);
        emit(result, tel::detect_anomalies(ledger->chain.records(), schema->schema, parse_or(options_json, nullptr)));
    });
}

tel_status tel_cluster(const tel_ledger* ledger, const tel_schema* schema, const char* options_json, char** result) {
    return guarded([&] {
        require(ledger != nullptr && schema != nullptr && result != nullptr, "ledger, schema and out are required");
        std::shared_lock lock(ledger->mutex);
        emit(result, tel::cluster_records(ledger->chain.records(), schema->schema, parse_or(options_json, nullptr)));
    });
}

tel_status tel_mine(const tel_ledger* ledger, const char* options_json, char** result) {
    return guarded([&] {
        require(ledger != nullptr && result != nullptr, "ledger and out are required");
        std::shared_lock lock(ledger->mutex);
        emit(result, tel::mine_records(ledger->chain.records(), parse_or(options_json, nullptr)));
    });
}

tel_status tel_forecast(const tel_ledger* ledger, const char* options_json, char** result) {
    return guarded([&] {
        require(ledger != nullptr && result != nullptr, "ledger and out are required");
        std::shared_lock lock(ledger->mutex);
        emit(result, tel::forecast_records(ledger->chain.records(), parse_or(options_json, nullptr)));
    });
}

tel_status tel_audit_mpc(const tel_ledger* const* chains, size_t count, const char* predicate, uint64_t seed,
                         char** transcript) {
    return guarded([&] {
        require(transcript != nullptr && predicate != nullptr, "predicate and out are required");
        require(count == 0 || chains != nullptr, "chains is NULL");
        std::vector<tel::LedgerChain> copies;
        copies.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            require(chains[i] != nullptr, "NULL chain");
            std::shared_lock lock(chains[i]->mutex);
            copies.push_back(chains[i]->chain);
        }
        const auto t = tel::run_compliance_audit(copies, tel::parse_predicate(predicate), seed);
        emit(transcript, tel::to_json(t));
    });
}

tel_status tel_transcript_hash(const char* transcript_json, char** hex) {
    return guarded([&] {
        require(transcript_json != nullptr && hex != nullptr, "transcript and out are required");
        *hex = dup(tel::transcript_hash(tel::transcript_from_json(parse_or(transcript_json, nullptr))));
    });
}

tel_status tel_attest(tel_ledger* ledger, const char* transcript_json, const char* recorded_at, char** record) {
    return guarded([&] {
        require(ledger != nullptr && transcript_json != nullptr, "ledger and transcript are required");
        const auto t = tel::transcript_from_json(parse_or(transcript_json, nullptr));
        std::unique_lock lock(ledger->mutex);
        std::optional<std::string> when;
        if (recorded_at != nullptr) when = recorded_at;
        const auto& appended = ledger->chain.append(tel::attestation_record(t, ledger->chain, when));
        emit(record, tel::record_to_json(appended));
    });
}

}  // extern "C"
