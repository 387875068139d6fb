/*
 * libtel C interface.
 *
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function. Structured results come back as NUL-terminated UTF-8 JSON
 * strings that the caller releases with tel_string_free. Every function that
 * can fail returns a tel_status; on failure the message is available from
 * tel_last_error() on the same thread until the next call.
 *
 * A tel_ledger handle may be read from several threads at once; calls that
 * modify it take an exclusive lock.
 */
#ifndef TEL_TEL_H
#define TEL_TEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TEL_API __declspec(dllexport)
#else
#define TEL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tel_status {
    TEL_OK = 0,
    TEL_E_INVALID_ARGUMENT = 1,
    TEL_E_INVALID_RECORD = 2,
    TEL_E_DUPLICATE_REFERENCE_KEY = 3,
    TEL_E_UNBALANCED_RECORD = 4,
    TEL_E_CURRENCY_MISMATCH = 5,
    TEL_E_UNPARSEABLE_TIMESTAMP = 6,
    TEL_E_SOURCE_UNREADABLE = 7,
    TEL_E_MAPPING_INCOMPLETE = 8,
    TEL_E_DUPLICATE_KEY_WITHIN_CHAIN = 9,
    TEL_E_RULE_TEMPLATE_UNBALANCED = 10,
    TEL_E_INVALID_RULE = 11,
    TEL_E_EMPTY_INPUT = 12,
    TEL_E_ALL_MISSING_NUMERIC_COLUMN = 13,
    TEL_E_SINGLE_CLASS = 14,
    TEL_E_KEEP_OUT_OF_RANGE = 15,
    TEL_E_NON_FINITE_FEATURE = 16,
    TEL_E_K_OUT_OF_RANGE = 17,
    TEL_E_TOO_FEW_ROWS = 18,
    TEL_E_DEGENERATE_TIME_AXIS = 19,
    TEL_E_LENGTH_MISMATCH = 20,
    TEL_E_SINGLE_CLUSTER = 21,
    TEL_E_FRACTION_OUT_OF_RANGE = 22,
    TEL_E_SUPPORT_OUT_OF_RANGE = 23,
    TEL_E_NOT_DOWNWARD_CLOSED = 24,
    TEL_E_MAGNITUDE_TOO_LARGE = 25,
    TEL_E_TOO_FEW_PARTIES = 26,
    TEL_E_INCOMPLETE_SHARE_SET = 27,
    TEL_E_MIXED_SESSIONS = 28,
    TEL_E_UNKNOWN_PREDICATE = 29,
    TEL_E_IO = 30,
    TEL_E_PARSE = 31,
    TEL_E_INTERNAL = 99
} tel_status;

typedef struct tel_ledger tel_ledger;
typedef struct tel_schema tel_schema;

TEL_API const char* tel_version(void);
/* Name of a status code, e.g. "UnbalancedRecord". Static storage. */
TEL_API const char* tel_status_name(tel_status status);
/* Message of the last failure on this thread; "" when none. */
TEL_API const char* tel_last_error(void);
TEL_API void tel_string_free(char* s);

/* ---- ledger ---------------------------------------------------------- */

TEL_API tel_status tel_ledger_create(const char* owner, tel_ledger** out);
/* Reads a JSONL chain as stored; does not verify it. */
TEL_API tel_status tel_ledger_load(const char* path, const char* owner, tel_ledger** out);
TEL_API tel_status tel_ledger_save(const tel_ledger* ledger, const char* path);
TEL_API void tel_ledger_free(tel_ledger* ledger);
TEL_API tel_status tel_ledger_owner(const tel_ledger* ledger, char** out);
TEL_API tel_status tel_ledger_size(const tel_ledger* ledger, size_t* out);
/* Appends one record object; prev/record hashes are assigned. The stored
 * record is returned in *stored when stored is not NULL. */
TEL_API tel_status tel_ledger_append_json(tel_ledger* ledger, const char* record_json, char** stored);
TEL_API tel_status tel_ledger_record_json(const tel_ledger* ledger, size_t index, char** out);
/* {"ok":bool,"failing_index":n|null,"reason":"..."}. Returns TEL_OK when the
 * check ran, whatever the outcome. */
TEL_API tel_status tel_ledger_verify(const tel_ledger* ledger, char** report);
/* New chain holding the records that name party on either side. */
TEL_API tel_status tel_ledger_party_view(const tel_ledger* ledger, const char* party, tel_ledger** out);

TEL_API tel_status tel_record_hash(const char* record_json, char** hex);
TEL_API tel_status tel_sha256_file(const char* path, char** hex);

/* ---- ingest, reconcile, settle ----------------------------------------- */

/* options: {"mapping":{column:field},"delimiter":",","default_currency":"USD",
 * "tag_separator":";"}; NULL for identity mapping. Accepted rows are
 * appended to ledger. */
TEL_API tel_status tel_ingest_file(tel_ledger* ledger, const char* path, const char* options_json, char** report);
TEL_API tel_status tel_reconcile(const tel_ledger* a, const tel_ledger* b, char** report);
/* Evaluates settlement rules and appends the records they produce; *appended
 * receives them as a JSON array. */
TEL_API tel_status tel_settle(tel_ledger* ledger, const char* rules_json, char** appended);

/* ---- features ----------------------------------------------------------- */

/* config: {"defaults":bool,"roles":{field:role},"target":"..."}; NULL for
 * the default roles and no target. */
TEL_API tel_status tel_schema_fit(const tel_ledger* ledger, const char* config_json, tel_schema** out);
TEL_API tel_status tel_schema_to_json(const tel_schema* schema, char** out);
TEL_API tel_status tel_schema_from_json(const char* json, tel_schema** out);
TEL_API void tel_schema_free(tel_schema* schema);
TEL_API tel_status tel_encode(const tel_ledger* ledger, const tel_schema* schema, char** matrix);

/* ---- analytics and mining ---------------------------------------------- */

TEL_API tel_status tel_train(const tel_ledger* ledger, const tel_schema* schema, const char* options_json,
                             char** result);
TEL_API tel_status tel_predict(const tel_ledger* ledger, const tel_schema* schema, const char* model_json,
                               char** result);
TEL_API tel_status tel_detect(const tel_ledger* ledger, const tel_schema* schema, const char* options_json,
                              char** result);
TEL_API tel_status tel_cluster(const tel_ledger* ledger, const tel_schema* schema, const char* options_json,
                               char** result);
TEL_API tel_status tel_mine(const tel_ledger* ledger, const char* options_json, char** result);
TEL_API tel_status tel_forecast(const tel_ledger* ledger, const char* options_json, char** result);

/* ---- multi-party audit -------------------------------------------------- */

/* One chain per party; each chain's owner names the party. predicate is
 * "net_balance_zero" or "aggregate_below_threshold(<limit>)". */
TEL_API tel_status tel_audit_mpc(const tel_ledger* const* chains, size_t count, const char* predicate, uint64_t seed,
                                 char** transcript);
TEL_API tel_status tel_transcript_hash(const char* transcript_json, char** hex);
/* Appends the attestation record; recorded_at may be NULL. */
TEL_API tel_status tel_attest(tel_ledger* ledger, const char* transcript_json, const char* recorded_at,
                              char** record);

#ifdef __cplusplus
}
#endif

#endif
