#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/matrix.hpp"
#include "tel/record.hpp"
#include "tel/timestamp.hpp"

namespace tel {

inline constexpr const char* kMissingCategory = "__missing__";
inline constexpr const char* kUnknownCategory = "__unknown__";

// ---------------------------------------------------------------------------
// Record table: the fields a record exposes to the feature pipeline.
//
//   text-valued:    reference_key, party_from, party_to, location,
//                   item_description, rationale, currency, debit_account,
//                   credit_account, tags (space-joined), occurred_at
//   numeric-valued: amount (minor units), hour_of_day
// ---------------------------------------------------------------------------

using TextColumn = std::vector<std::optional<std::string>>;
using NumericColumn = std::vector<std::optional<double>>;

struct RecordTable {
    std::size_t rows = 0;
    std::map<std::string, TextColumn> text;
    std::map<std::string, NumericColumn> numeric;
    std::vector<std::set<std::string>> tags;  // per-row tag sets, for "tag:<name>" targets
};

RecordTable extract_table(const std::vector<TripleEntryRecord>& records);

enum class FieldRole { Identifier, Categorical, Numeric, Text, Time, Ignore };

std::string to_string(FieldRole role);
FieldRole field_role_from_string(const std::string& s);

/// Which fields become features and which one is the label. The target is a
/// numeric field, a categorical field (classes indexed in sorted order), or
/// "tag:<name>" (1 when the tag is present). Empty means no target.
struct FeatureConfig {
    std::map<std::string, FieldRole> roles;
    std::string target;

    static FeatureConfig defaults();
};

FeatureConfig feature_config_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Column specs
// ---------------------------------------------------------------------------

struct OneHotSpec {
    std::vector<std::string> categories;  // sorted, deduplicated
};

struct TimeDeltaSpec {
    Timestamp reference;
    double mean_days = 0.0;  // imputation value for missing timestamps
};

struct TfidfSpec {
    std::vector<std::string> vocabulary;  // sorted
    std::vector<double> idf;              // aligned with vocabulary
    std::size_t documents = 0;
};

struct NumericSpec {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct ColumnSpec {
    std::string field;
    std::variant<OneHotSpec, TimeDeltaSpec, TfidfSpec, NumericSpec> kind;

    std::size_t width() const;
    std::vector<std::string> output_names() const;
};

struct TargetSpec {
    enum class Kind { None, Numeric, Tag, Categorical };
    Kind kind = Kind::None;
    std::string field;                 // field name, or tag name for Kind::Tag
    std::vector<std::string> classes;  // Kind::Categorical
    double numeric_mean = 0.0;         // Kind::Numeric imputation
};

struct FeatureSchema {
    std::vector<ColumnSpec> columns;
    TargetSpec target;
    std::vector<std::string> dropped_constant;  // categorical fields with one value at fit time

    std::size_t width() const;
    std::vector<std::string> column_names() const;
};

nlohmann::json to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Fitting and encoding
// ---------------------------------------------------------------------------

/// Fits every statistic from the input only. Identifier and ignored fields
/// produce no columns. Throws EmptyInput, AllMissingNumericColumn,
/// UnparseableTimestamp or InvalidArgument (unknown field or role).
FeatureSchema fit_schema(const RecordTable& table, const FeatureConfig& config);
FeatureSchema fit_schema(const std::vector<TripleEntryRecord>& records, const FeatureConfig& config);

/// Applies a fitted schema. Output has schema.width() columns and no NaN.
FeatureMatrix transform(const RecordTable& table, const FeatureSchema& schema);
FeatureMatrix transform(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema);

/// |categories| + 1 entries; the last is the unknown flag.
std::vector<double> encode_one_hot(const std::string& value, const std::vector<std::string>& categories);

/// floor((t - reference) / 1 day). Throws UnparseableTimestamp.
std::int64_t encode_time_delta(const std::string& t, const std::string& reference);

/// Lowercased runs of ASCII letters/digits; bytes >= 0x80 count as letters so
/// UTF-8 words stay intact.
std::vector<std::string> tokenize(const std::string& text);

/// idf = ln((1 + N) / (1 + df)) + 1 over the fitted documents.
TfidfSpec fit_tfidf(const std::vector<std::string>& documents);

/// Raw-count tf times idf, L2-normalized; out-of-vocabulary tokens ignored.
std::vector<double> encode_text_tfidf(const std::string& document, const TfidfSpec& spec);

/// Throws AllMissingNumericColumn when no value is present.
NumericSpec fit_numeric(const NumericColumn& column);

/// (x - min) / (max - min) clamped to [0, 1]; a constant fit maps to 0.
std::vector<double> normalize_minmax(const std::vector<double>& column, const NumericSpec& spec);

std::vector<double> impute_numeric(const NumericColumn& column, const NumericSpec& spec);
std::vector<std::string> impute_categorical(const TextColumn& column);

}  // namespace tel
