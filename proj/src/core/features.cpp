#include "tel/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tel/error.hpp"

namespace tel {

namespace {

using nlohmann::json;

const std::set<std::string> kTextFields = {"reference_key", "party_from",  "party_to",       "location",
                                           "item_description", "rationale", "currency",     "debit_account",
                                           "credit_account",   "tags",      "occurred_at"};
const std::set<std::string> kNumericFields = {"amount", "hour_of_day"};

std::string join_tags(const std::set<std::string>& tags) {
    std::string out;
    for (const auto& t : tags) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::optional<Timestamp>> parse_times(const TextColumn& column) {
    std::vector<std::optional<Timestamp>> out;
    out.reserve(column.size());
    for (const auto& v : column) out.push_back(v ? std::optional<Timestamp>(parse_rfc3339(*v)) : std::nullopt);
    return out;
}

OneHotSpec fit_one_hot(const TextColumn& column) {
    std::set<std::string> seen;
    for (const auto& v : column) seen.insert(v.value_or(kMissingCategory));
    return OneHotSpec{{seen.begin(), seen.end()}};
}

TimeDeltaSpec fit_time(const TextColumn& column) {
    const auto times = parse_times(column);
    std::optional<Timestamp> earliest;
    for (const auto& t : times) {
        if (t && (!earliest || *t < *earliest)) earliest = t;
    }
    if (!earliest) throw Error(ErrorCode::AllMissingNumericColumn, "time column has no values");
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& t : times) {
        if (!t) continue;
        sum += static_cast<double>(days_between(*earliest, *t));
        ++n;
    }
    return TimeDeltaSpec{*earliest, sum / static_cast<double>(n)};
}

std::vector<std::string> documents_of(const TextColumn& column) {
    std::vector<std::string> docs;
    docs.reserve(column.size());
    for (const auto& v : column) docs.push_back(v.value_or(""));
    return docs;
}

const TextColumn& text_column(const RecordTable& table, const std::string& field) {
    auto it = table.text.find(field);
    if (it == table.text.end()) throw Error(ErrorCode::InvalidArgument, "'" + field + "' is not a text field");
    return it->second;
}

const NumericColumn& numeric_column(const RecordTable& table, const std::string& field) {
    auto it = table.numeric.find(field);
    if (it == table.numeric.end()) throw Error(ErrorCode::InvalidArgument, "'" + field + "' is not a numeric field");
    return it->second;
}

}  // namespace

RecordTable extract_table(const std::vector<TripleEntryRecord>& records) {
    RecordTable t;
    t.rows = records.size();
    for (const auto& f : kTextFields) t.text[f].reserve(records.size());
    for (const auto& f : kNumericFields) t.numeric[f].reserve(records.size());
    for (const auto& r : records) {
        const ContextMetadata& m = r.metadata();
        t.text["reference_key"].emplace_back(r.reference_key());
        t.text["party_from"].emplace_back(m.party_from);
        t.text["party_to"].emplace_back(m.party_to);
        t.text["location"].push_back(m.location);
        t.text["item_description"].push_back(m.item_description);
        t.text["rationale"].push_back(m.rationale);
        t.text["currency"].emplace_back(r.currency());
        t.text["debit_account"].push_back(r.debits.empty() ? std::nullopt
                                                           : std::optional<std::string>(r.debits.front().account));
        t.text["credit_account"].push_back(r.credits.empty() ? std::nullopt
                                                             : std::optional<std::string>(r.credits.front().account));
        t.text["tags"].push_back(m.tags.empty() ? std::nullopt : std::optional<std::string>(join_tags(m.tags)));
        t.text["occurred_at"].emplace_back(m.occurred_at);
        t.numeric["amount"].emplace_back(static_cast<double>(r.total()));
        std::optional<double> hour;
        try {
            hour = static_cast<double>(hour_of_day(parse_rfc3339(m.occurred_at)));
        } catch (const Error&) {
        }
        t.numeric["hour_of_day"].push_back(hour);
        t.tags.push_back(m.tags);
    }
    return t;
}

std::string to_string(FieldRole role) {
    switch (role) {
        case FieldRole::Identifier: return "identifier";
        case FieldRole::Categorical: return "categorical";
        case FieldRole::Numeric: return "numeric";
        case FieldRole::Text: return "text";
        case FieldRole::Time: return "time";
        case FieldRole::Ignore: return "ignore";
    }
    return "ignore";
}

FieldRole field_role_from_string(const std::string& s) {
    if (s == "identifier") return FieldRole::Identifier;
    if (s == "categorical") return FieldRole::Categorical;
    if (s == "numeric") return FieldRole::Numeric;
    if (s == "text") return FieldRole::Text;
    if (s == "time") return FieldRole::Time;
    if (s == "ignore") return FieldRole::Ignore;
    throw Error(ErrorCode::InvalidArgument, "unknown field role '" + s + "'");
}

FeatureConfig FeatureConfig::defaults() {
    FeatureConfig c;
    c.roles = {{"reference_key", FieldRole::Identifier},
               {"debit_account", FieldRole::Identifier},
               {"credit_account", FieldRole::Identifier},
               {"party_from", FieldRole::Categorical},
               {"party_to", FieldRole::Categorical},
               {"location", FieldRole::Categorical},
               {"currency", FieldRole::Categorical},
               {"item_description", FieldRole::Text},
               {"tags", FieldRole::Ignore},
               {"rationale", FieldRole::Ignore},
               {"occurred_at", FieldRole::Time},
               {"amount", FieldRole::Numeric},
               {"hour_of_day", FieldRole::Numeric}};
    return c;
}

FeatureConfig feature_config_from_json(const json& j) {
    FeatureConfig c = j.value("defaults", true) ? FeatureConfig::defaults() : FeatureConfig{};
    try {
        if (auto it = j.find("roles"); it != j.end()) {
            for (const auto& [field, role] : it->items()) c.roles[field] = field_role_from_string(role.get<std::string>());
        }
        c.target = j.value("target", std::string{});
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad feature config: ") + e.what());
    }
    return c;
}

std::size_t ColumnSpec::width() const {
    return std::visit(Overloaded{[](const OneHotSpec& s) { return s.categories.size() + 1; },
                                 [](const TimeDeltaSpec&) -> std::size_t { return 1; },
                                 [](const TfidfSpec& s) { return s.vocabulary.size(); },
                                 [](const NumericSpec&) -> std::size_t { return 1; }},
                      kind);
}

std::vector<std::string> ColumnSpec::output_names() const {
    std::vector<std::string> names;
    std::visit(Overloaded{[&](const OneHotSpec& s) {
                              for (const auto& c : s.categories) names.push_back(field + "=" + c);
                              names.push_back(field + "=" + kUnknownCategory);
                          },
                          [&](const TimeDeltaSpec&) { names.push_back(field + ":days"); },
                          [&](const TfidfSpec& s) {
                              for (const auto& w : s.vocabulary) names.push_back(field + ":" + w);
                          },
                          [&](const NumericSpec&) { names.push_back(field); }},
               kind);
    return names;
}

std::size_t FeatureSchema::width() const {
    std::size_t w = 0;
    for (const auto& c : columns) w += c.width();
    return w;
}

std::vector<std::string> FeatureSchema::column_names() const {
    std::vector<std::string> names;
    for (const auto& c : columns) {
        auto more = c.output_names();
        names.insert(names.end(), more.begin(), more.end());
    }
    return names;
}

std::vector<double> encode_one_hot(const std::string& value, const std::vector<std::string>& categories) {
    std::vector<double> out(categories.size() + 1, 0.0);
    auto it = std::lower_bound(categories.begin(), categories.end(), value);
    if (it != categories.end() && *it == value) {
        out[static_cast<std::size_t>(it - categories.begin())] = 1.0;
    } else {
        out.back() = 1.0;
    }
    return out;
}

std::int64_t encode_time_delta(const std::string& t, const std::string& reference) {
    return days_between(parse_rfc3339(reference), parse_rfc3339(t));
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        const bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (word) {
            current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

TfidfSpec fit_tfidf(const std::vector<std::string>& documents) {
    std::map<std::string, std::size_t> df;
    for (const auto& doc : documents) {
        auto tokens = tokenize(doc);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& t : tokens) ++df[t];
    }
    TfidfSpec spec;
    spec.documents = documents.size();
    const double n = static_cast<double>(documents.size());
    for (const auto& [token, count] : df) {
        spec.vocabulary.push_back(token);
        spec.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return spec;
}

std::vector<double> encode_text_tfidf(const std::string& document, const TfidfSpec& spec) {
    std::vector<double> out(spec.vocabulary.size(), 0.0);
    for (const auto& token : tokenize(document)) {
        auto it = std::lower_bound(spec.vocabulary.begin(), spec.vocabulary.end(), token);
        if (it != spec.vocabulary.end() && *it == token) out[static_cast<std::size_t>(it - spec.vocabulary.begin())] += 1.0;
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] *= spec.idf[i];
        norm += out[i] * out[i];
    }
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& v : out) v /= norm;
    }
    return out;
}

NumericSpec fit_numeric(const NumericColumn& column) {
    NumericSpec spec;
    std::size_t n = 0;
    double sum = 0.0;
    for (const auto& v : column) {
        if (!v) continue;
        if (!std::isfinite(*v)) throw Error(ErrorCode::NonFiniteFeature, "numeric column holds a non-finite value");
        if (n == 0) {
            spec.min = spec.max = *v;
        } else {
            spec.min = std::min(spec.min, *v);
            spec.max = std::max(spec.max, *v);
        }
        sum += *v;
        ++n;
    }
    if (n == 0) throw Error(ErrorCode::AllMissingNumericColumn, "numeric column has no values to fit");
    spec.mean = sum / static_cast<double>(n);
    return spec;
}

std::vector<double> normalize_minmax(const std::vector<double>& column, const NumericSpec& spec) {
    std::vector<double> out(column.size(), 0.0);
    const double range = spec.max - spec.min;
    if (!(range > 0.0)) return out;
    for (std::size_t i = 0; i < column.size(); ++i) out[i] = std::clamp((column[i] - spec.min) / range, 0.0, 1.0);
    return out;
}

std::vector<double> impute_numeric(const NumericColumn& column, const NumericSpec& spec) {
    std::vector<double> out;
    out.reserve(column.size());
    for (const auto& v : column) out.push_back(v.value_or(spec.mean));
    return out;
}

std::vector<std::string> impute_categorical(const TextColumn& column) {
    std::vector<std::string> out;
    out.reserve(column.size());
    for (const auto& v : column) out.push_back(v.value_or(kMissingCategory));
    return out;
}

FeatureSchema fit_schema(const RecordTable& table, const FeatureConfig& config) {
    if (table.rows == 0) throw Error(ErrorCode::EmptyInput, "cannot fit a schema on zero records");
    FeatureSchema schema;

    const std::string& target = config.target;
    if (target.rfind("tag:", 0) == 0) {
        schema.target.kind = TargetSpec::Kind::Tag;
        schema.target.field = target.substr(4);
    } else if (!target.empty()) {
        schema.target.field = target;
        if (table.numeric.contains(target)) {
            schema.target.kind = TargetSpec::Kind::Numeric;
            schema.target.numeric_mean = fit_numeric(numeric_column(table, target)).mean;
        } else if (table.text.contains(target)) {
            schema.target.kind = TargetSpec::Kind::Categorical;
            schema.target.classes = fit_one_hot(text_column(table, target)).categories;
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown target field '" + target + "'");
        }
    }

    for (const auto& [field, role] : config.roles) {
        if (field == schema.target.field && schema.target.kind != TargetSpec::Kind::Tag) continue;
        switch (role) {
            case FieldRole::Identifier:
            case FieldRole::Ignore:
                if (!table.text.contains(field) && !table.numeric.contains(field)) {
                    throw Error(ErrorCode::InvalidArgument, "unknown field '" + field + "'");
                }
                break;
            case FieldRole::Categorical: {
                OneHotSpec spec = fit_one_hot(text_column(table, field));
                if (spec.categories.size() == 1) {
                    schema.dropped_constant.push_back(field);
                } else {
                    schema.columns.push_back({field, std::move(spec)});
                }
                break;
            }
            case FieldRole::Numeric:
                schema.columns.push_back({field, fit_numeric(numeric_column(table, field))});
                break;
            case FieldRole::Text:
                schema.columns.push_back({field, fit_tfidf(documents_of(text_column(table, field)))});
                break;
            case FieldRole::Time:
                schema.columns.push_back({field, fit_time(text_column(table, field))});
                break;
        }
    }
    return schema;
}

FeatureSchema fit_schema(const std::vector<TripleEntryRecord>& records, const FeatureConfig& config) {
    return fit_schema(extract_table(records), config);
}

FeatureMatrix transform(const RecordTable& table, const FeatureSchema& schema) {
    FeatureMatrix out;
    out.values = Matrix(table.rows, schema.width());
    out.columns = schema.column_names();
    std::size_t offset = 0;
    for (const auto& column : schema.columns) {
        std::visit(Overloaded{[&](const OneHotSpec& s) {
                                  const auto values = impute_categorical(text_column(table, column.field));
                                  for (std::size_t r = 0; r < table.rows; ++r) {
                                      const auto encoded = encode_one_hot(values[r], s.categories);
                                      std::copy(encoded.begin(), encoded.end(), out.values.row(r).begin() + offset);
                                  }
                              },
                              [&](const TimeDeltaSpec& s) {
                                  const auto times = parse_times(text_column(table, column.field));
                                  for (std::size_t r = 0; r < table.rows; ++r) {
                                      out.values(r, offset) = times[r] ? static_cast<double>(days_between(s.reference, *times[r]))
                                                                       : std::floor(s.mean_days);
                                  }
                              },
                              [&](const TfidfSpec& s) {
                                  const auto docs = documents_of(text_column(table, column.field));
                                  for (std::size_t r = 0; r < table.rows; ++r) {
                                      const auto encoded = encode_text_tfidf(docs[r], s);
                                      std::copy(encoded.begin(), encoded.end(), out.values.row(r).begin() + offset);
                                  }
                              },
                              [&](const NumericSpec& s) {
                                  const auto values =
                                      normalize_minmax(impute_numeric(numeric_column(table, column.field), s), s);
                                  for (std::size_t r = 0; r < table.rows; ++r) out.values(r, offset) = values[r];
                              }},
                   column.kind);
        offset += column.width();
    }

    const TargetSpec& target = schema.target;
    switch (target.kind) {
        case TargetSpec::Kind::None:
            break;
        case TargetSpec::Kind::Tag:
            for (std::size_t r = 0; r < table.rows; ++r) {
                out.target.push_back(r < table.tags.size() && table.tags[r].contains(target.field) ? 1.0 : 0.0);
            }
            break;
        case TargetSpec::Kind::Numeric:
            for (const auto& v : numeric_column(table, target.field)) out.target.push_back(v.value_or(target.numeric_mean));
            break;
        case TargetSpec::Kind::Categorical:
            for (const auto& v : impute_categorical(text_column(table, target.field))) {
                auto it = std::lower_bound(target.classes.begin(), target.classes.end(), v);
                out.target.push_back(it != target.classes.end() && *it == v
                                         ? static_cast<double>(it - target.classes.begin())
                                         : -1.0);
            }
            break;
    }
    return out;
}

FeatureMatrix transform(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema) {
    return transform(extract_table(records), schema);
}

json to_json(const FeatureSchema& schema) {
    json columns = json::array();
    for (const auto& c : schema.columns) {
        json col{{"field", c.field}};
        std::visit(Overloaded{[&](const OneHotSpec& s) {
                                  col["kind"] = "one_hot";
                                  col["categories"] = s.categories;
                              },
                              [&](const TimeDeltaSpec& s) {
                                  col["kind"] = "time_delta";
                                  col["reference"] = format_rfc3339(s.reference);
                                  col["mean_days"] = s.mean_days;
                              },
                              [&](const TfidfSpec& s) {
                                  col["kind"] = "tfidf";
                                  col["vocabulary"] = s.vocabulary;
                                  col["idf"] = s.idf;
                                  col["documents"] = s.documents;
                              },
                              [&](const NumericSpec& s) {
                                  col["kind"] = "numeric";
                                  col["min"] = s.min;
                                  col["max"] = s.max;
                                  col["mean"] = s.mean;
                              }},
                   c.kind);
        columns.push_back(std::move(col));
    }
    static constexpr const char* kTargetKinds[] = {"none", "numeric", "tag", "categorical"};
    return json{{"columns", std::move(columns)},
                {"dropped_constant", schema.dropped_constant},
                {"width", schema.width()},
                {"target",
                 json{{"kind", kTargetKinds[static_cast<int>(schema.target.kind)]},
                      {"field", schema.target.field},
                      {"classes", schema.target.classes},
                      {"numeric_mean", schema.target.numeric_mean}}}};
}

FeatureSchema schema_from_json(const json& j) {
    try {
        FeatureSchema schema;
        for (const auto& col : j.at("columns")) {
            const std::string kind = col.at("kind").get<std::string>();
            ColumnSpec spec{col.at("field").get<std::string>(), NumericSpec{}};
            if (kind == "one_hot") {
                spec.kind = OneHotSpec{col.at("categories").get<std::vector<std::string>>()};
            } else if (kind == "time_delta") {
                spec.kind = TimeDeltaSpec{parse_rfc3339(col.at("reference").get<std::string>()),
                                          col.at("mean_days").get<double>()};
            } else if (kind == "tfidf") {
                spec.kind = TfidfSpec{col.at("vocabulary").get<std::vector<std::string>>(),
                                      col.at("idf").get<std::vector<double>>(), col.at("documents").get<std::size_t>()};
            } else if (kind == "numeric") {
                spec.kind = NumericSpec{col.at("min").get<double>(), col.at("max").get<double>(), col.at("mean").get<double>()};
            } else {
                throw Error(ErrorCode::Parse, "unknown column kind '" + kind + "'");
            }
            schema.columns.push_back(std::move(spec));
        }
        schema.dropped_constant = j.value("dropped_constant", std::vector<std::string>{});
        const json& t = j.at("target");
        const std::string kind = t.at("kind").get<std::string>();
        if (kind == "numeric") schema.target.kind = TargetSpec::Kind::Numeric;
        else if (kind == "tag") schema.target.kind = TargetSpec::Kind::Tag;
        else if (kind == "categorical") schema.target.kind = TargetSpec::Kind::Categorical;
        schema.target.field = t.value("field", std::string{});
        schema.target.classes = t.value("classes", std::vector<std::string>{});
        schema.target.numeric_mean = t.value("numeric_mean", 0.0);
        return schema;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed schema: ") + e.what());
    }
}

}  // namespace tel
