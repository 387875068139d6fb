#include "tel/ingest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <set>
#include <unordered_set>

#include "tel/error.hpp"
#include "tel/timestamp.hpp"

namespace tel {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 12> kFields = {"reference_key", "party_from",     "party_to",       "amount",
                                                 "currency",      "occurred_at",    "debit_account",  "credit_account",
                                                 "location",      "item_description", "tags",         "rationale"};
constexpr std::array<const char*, 5> kRequired = {"reference_key", "party_from", "party_to", "amount", "occurred_at"};

bool is_known_field(const std::string& f) {
    return std::find(kFields.begin(), kFields.end(), f) != kFields.end();
}

/// field -> value for one source row; absent or empty cells are omitted.
using FieldValues = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::set<std::string> split_tags(const std::string& text, char sep) {
    std::set<std::string> tags;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(sep, start);
        if (end == std::string::npos) end = text.size();
        std::string tag = trim(text.substr(start, end - start));
        if (!tag.empty()) tags.insert(std::move(tag));
        start = end + 1;
    }
    return tags;
}

/// Builds a record from mapped values; returns the rejection reason or "".
std::string build_record(const FieldValues& v, const IngestOptions& options, TripleEntryRecord& out) {
    for (const char* f : kRequired) {
        if (!v.contains(f)) return std::string("missing value for ") + f;
    }
    auto get = [&](const char* f) -> const std::string& { return v.at(f); };
    auto opt = [&](const char* f) -> std::optional<std::string> {
        auto it = v.find(f);
        return it == v.end() ? std::nullopt : std::optional<std::string>(it->second);
    };

    const std::string currency = opt("currency").value_or(options.default_currency);
    if (!is_currency_code(currency)) return "invalid currency '" + currency + "'";
    std::int64_t units = 0;
    if (std::string reason = parse_decimal_amount(get("amount"), currency, units); !reason.empty()) return reason;

    std::string occurred_at;
    try {
        occurred_at = normalize_rfc3339(get("occurred_at"));
    } catch (const Error&) {
        return "unparseable timestamp";
    }
    if (get("party_from") == get("party_to")) return "party_from equals party_to";

    TripleEntryRecord r;
    r.debits.push_back({opt("debit_account").value_or("assets:" + get("party_to")), {units, currency}});
    r.credits.push_back({opt("credit_account").value_or("assets:" + get("party_from")), {units, currency}});
    r.third.reference_key = get("reference_key");
    ContextMetadata& m = r.third.metadata;
    m.party_from = get("party_from");
    m.party_to = get("party_to");
    m.occurred_at = occurred_at;
    m.location = opt("location");
    m.item_description = opt("item_description");
    m.rationale = opt("rationale");
    if (auto tags = opt("tags")) m.tags = split_tags(*tags, options.tag_separator);
    try {
        validate_record(r);
    } catch (const Error& e) {
        return e.what();
    }
    out = std::move(r);
    return {};
}

void check_mapping_fields(const IngestOptions& options) {
    std::set<std::string> mapped;
    for (const auto& [column, field] : options.column_to_field) {
        if (!is_known_field(field)) throw Error(ErrorCode::MappingIncomplete, "unknown target field '" + field + "'");
        if (!mapped.insert(field).second) {
            throw Error(ErrorCode::MappingIncomplete, "field '" + field + "' mapped from more than one column");
        }
    }
    for (const char* f : kRequired) {
        if (!mapped.contains(f)) throw Error(ErrorCode::MappingIncomplete, std::string("no column maps to ") + f);
    }
}

class BatchBuilder {
public:
    explicit BatchBuilder(const IngestOptions& options) : options_(options) {}

    void add(std::size_t line, const FieldValues& values) {
        TripleEntryRecord r;
        std::string reason = build_record(values, options_, r);
        if (reason.empty() && !keys_.insert(r.reference_key()).second) reason = "duplicate reference key";
        accept_or_reject(line, std::move(r), std::move(reason));
    }

    void accept_or_reject(std::size_t line, TripleEntryRecord r, std::string reason) {
        if (reason.empty()) {
            result_.records.push_back(std::move(r));
            result_.lines.push_back(line);
            ++result_.report.accepted;
        } else {
            result_.report.rejected.push_back({line, std::move(reason)});
        }
    }

    bool claim_key(const std::string& key) { return keys_.insert(key).second; }

    IngestResult take() { return std::move(result_); }

private:
    const IngestOptions& options_;
    IngestResult result_;
    std::unordered_set<std::string> keys_;
};

}  // namespace

int minor_unit_digits(const std::string& currency) noexcept {
    static const std::set<std::string> kZero = {"BIF", "CLP", "DJF", "GNF", "ISK", "JPY", "KMF", "KRW", "PYG",
                                                "RWF", "UGX", "UYI", "VND", "VUV", "XAF", "XOF", "XPF", "XXX"};
    static const std::set<std::string> kThree = {"BHD", "IQD", "JOD", "KWD", "LYD", "OMR", "TND"};
    if (kZero.contains(currency)) return 0;
    if (kThree.contains(currency)) return 3;
    return 2;
}

std::string parse_decimal_amount(const std::string& raw, const std::string& currency, std::int64_t& out) {
    const std::string text = trim(raw);
    const auto dot = text.find('.');
    const std::string whole = text.substr(0, dot);
    const std::string frac = dot == std::string::npos ? std::string{} : text.substr(dot + 1);
    auto all_digits = [](const std::string& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!all_digits(whole) || (dot != std::string::npos && !all_digits(frac))) return "unparseable amount";
    const int digits = minor_unit_digits(currency);
    if (static_cast<int>(frac.size()) != digits) return "amount precision mismatch";
    const std::string combined = whole + frac;
    const auto significant = combined.find_first_not_of('0');
    if (significant == std::string::npos) return "non-positive amount";
    if (combined.size() - significant > 16) return "amount too large";
    const std::int64_t units = std::stoll(combined.substr(significant));
    if (units > kMaxMinorUnits) return "amount too large";
    out = units;
    return {};
}

std::vector<CsvRow> parse_csv(std::istream& in, char delimiter) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    std::size_t line = 1;
    char c;
    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row = CsvRow{};
        row_started = false;
    };
    while (in.get(c)) {
        if (!row_started) {
            row.line = line;
            row_started = true;
        }
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\r' && in.peek() == '\n') {
            continue;
        } else if (c == '\n') {
            ++line;
            end_row();
        } else {
            field.push_back(c);
        }
    }
    if (row_started) end_row();
    // Blank lines produce a single empty field; drop them.
    std::erase_if(rows, [](const CsvRow& r) { return r.fields.size() == 1 && r.fields[0].empty(); });
    return rows;
}

IngestResult ingest_csv(std::istream& in, const IngestOptions& options) {
    std::vector<CsvRow> rows = parse_csv(in, options.delimiter);
    if (rows.empty()) throw Error(ErrorCode::SourceUnreadable, "CSV input has no header row");
    const std::vector<std::string>& header = rows.front().fields;

    IngestOptions effective = options;
    if (effective.column_to_field.empty()) {
        for (const auto& name : header) {
            if (is_known_field(trim(name))) effective.column_to_field[name] = trim(name);
        }
    }
    check_mapping_fields(effective);

    std::vector<std::pair<std::size_t, std::string>> columns;  // header index -> field
    for (const auto& [column, field] : effective.column_to_field) {
        auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == column; });
        if (it == header.end()) throw Error(ErrorCode::MappingIncomplete, "column '" + column + "' not in header");
        columns.emplace_back(static_cast<std::size_t>(it - header.begin()), field);
    }

    BatchBuilder batch(effective);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const CsvRow& row = rows[i];
        if (row.fields.size() != header.size()) {
            batch.accept_or_reject(row.line, {}, "expected " + std::to_string(header.size()) + " fields, found " +
                                                     std::to_string(row.fields.size()));
            continue;
        }
        FieldValues values;
        for (const auto& [index, field] : columns) {
            std::string cell = trim(row.fields[index]);
            if (!cell.empty()) values[field] = std::move(cell);
        }
        batch.add(row.line, values);
    }
    return batch.take();
}

IngestResult ingest_jsonl(std::istream& in, const IngestOptions& options) {
    if (!options.column_to_field.empty()) check_mapping_fields(options);
    BatchBuilder batch(options);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception&) {
            batch.accept_or_reject(line_no, {}, "malformed JSON");
            continue;
        }
        if (!obj.is_object()) {
            batch.accept_or_reject(line_no, {}, "line is not a JSON object");
            continue;
        }
        if (obj.contains("third")) {
            std::string reason;
            TripleEntryRecord r;
            try {
                r = record_from_json(obj);
                validate_record(r);
            } catch (const Error& e) {
                reason = e.what();
            }
            if (reason.empty() && !batch.claim_key(r.reference_key())) reason = "duplicate reference key";
            batch.accept_or_reject(line_no, std::move(r), std::move(reason));
            continue;
        }
        FieldValues values;
        for (const auto& [key, value] : obj.items()) {
            std::string field;
            if (options.column_to_field.empty()) {
                if (is_known_field(key)) field = key;
            } else if (auto it = options.column_to_field.find(key); it != options.column_to_field.end()) {
                field = it->second;
            }
            if (field.empty() || value.is_null()) continue;
            std::string text;
            if (value.is_string()) {
                text = value.get<std::string>();
            } else if (value.is_array() && field == "tags") {
                for (const auto& t : value) {
                    if (!text.empty()) text.push_back(options.tag_separator);
                    text += t.is_string() ? t.get<std::string>() : t.dump();
                }
            } else {
                text = value.dump();
            }
            text = trim(text);
            if (!text.empty()) values[field] = std::move(text);
        }
        batch.add(line_no, values);
    }
    return batch.take();
}

IngestResult ingest_file(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::SourceUnreadable, "cannot open " + path);
    auto ends_with = [&](const char* suffix) {
        const std::string s(suffix);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".jsonl") || ends_with(".ndjson")) return ingest_jsonl(in, options);
    return ingest_csv(in, options);
}

IngestOptions ingest_options_from_json(const json& j) {
    IngestOptions options;
    try {
        if (auto it = j.find("mapping"); it != j.end()) {
            for (const auto& [column, field] : it->items()) options.column_to_field[column] = field.get<std::string>();
        }
        if (auto it = j.find("delimiter"); it != j.end()) {
            const auto d = it->get<std::string>();
            if (d.size() != 1) throw Error(ErrorCode::InvalidArgument, "delimiter must be one character");
            options.delimiter = d[0];
        }
        if (auto it = j.find("default_currency"); it != j.end()) options.default_currency = it->get<std::string>();
        if (auto it = j.find("tag_separator"); it != j.end()) {
            const auto d = it->get<std::string>();
            if (d.size() != 1) throw Error(ErrorCode::InvalidArgument, "tag_separator must be one character");
            options.tag_separator = d[0];
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad ingest options: ") + e.what());
    }
    return options;
}

json to_json(const IngestReport& report) {
    json rejected = json::array();
    for (const auto& r : report.rejected) rejected.push_back(json{{"line", r.line}, {"reason", r.reason}});
    return json{{"accepted", report.accepted}, {"rejected", std::move(rejected)}};
}

}  // namespace tel
