#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/record.hpp"

namespace tel {

struct RejectedRow {
    std::size_t line = 0;  // 1-based line in the source (CSV header is line 1)
    std::string reason;

    friend bool operator==(const RejectedRow&, const RejectedRow&) = default;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::vector<RejectedRow> rejected;
};

/// Source column -> record field. Recognized fields: reference_key,
/// party_from, party_to, amount, currency, occurred_at, debit_account,
/// credit_account, location, item_description, tags, rationale.
/// reference_key, party_from, party_to, amount and occurred_at must be mapped.
struct IngestOptions {
    std::map<std::string, std::string> column_to_field;
    char delimiter = ',';
    std::string default_currency = "USD";  // used when no column maps to currency
    char tag_separator = ';';
};

struct IngestResult {
    std::vector<TripleEntryRecord> records;
    std::vector<std::size_t> lines;  // source line of each accepted record
    IngestReport report;
};

/// Decimal digits after the point for a currency (ISO 4217; 2 when unlisted).
int minor_unit_digits(const std::string& currency) noexcept;

/// Parses "1234.56" into minor units with exactly the currency's precision.
/// Returns an empty string on success, otherwise the rejection reason.
std::string parse_decimal_amount(const std::string& text, const std::string& currency, std::int64_t& out);

/// Splits CSV text into rows; quoted fields may contain delimiters,
/// doubled quotes and newlines. Each row carries its starting line number.
struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::istream& in, char delimiter);

/// Rows become balanced single-leg records (debit on the receiving side,
/// credit on the paying side). Bad rows are rejected with a reason; the
/// batch never aborts on a row. Throws MappingIncomplete for a mapping
/// that misses a required field or names a column absent from the header.
IngestResult ingest_csv(std::istream& in, const IngestOptions& options);

/// Each line is either a stored record object (has "third") or a flat
/// object whose keys are mapped like CSV columns.
IngestResult ingest_jsonl(std::istream& in, const IngestOptions& options);

/// Dispatches on extension: ".jsonl"/".ndjson" -> JSONL, anything else CSV.
/// Throws SourceUnreadable.
IngestResult ingest_file(const std::string& path, const IngestOptions& options);

IngestOptions ingest_options_from_json(const nlohmann::json& j);
nlohmann::json to_json(const IngestReport& report);

}  // namespace tel
