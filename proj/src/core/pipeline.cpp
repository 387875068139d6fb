#include "tel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "tel/anomaly.hpp"
#include "tel/clustering.hpp"
#include "tel/decision_tree.hpp"
#include "tel/error.hpp"
#include "tel/logistic.hpp"
#include "tel/metrics.hpp"
#include "tel/mining.hpp"
#include "tel/timestamp.hpp"

namespace tel {

using json = nlohmann::json;

namespace {

void check_keys(const json& options, std::initializer_list<const char*> allowed) {
    if (options.is_null()) return;
    if (!options.is_object()) throw Error(ErrorCode::InvalidArgument, "options must be a JSON object");
    for (const auto& [key, value] : options.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw Error(ErrorCode::InvalidArgument, "unknown option '" + key + "'");
        }
    }
}

template <typename T>
T opt(const json& options, const char* key, T fallback) {
    if (options.is_null() || !options.contains(key)) return fallback;
    try {
        return options.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidArgument, std::string("option '") + key + "' has the wrong type");
    }
}

std::string method_of(const json& options, std::initializer_list<const char*> methods) {
    const auto m = opt<std::string>(options, "method", *methods.begin());
    if (std::none_of(methods.begin(), methods.end(), [&](const char* a) { return m == a; })) {
        throw Error(ErrorCode::InvalidArgument, "unsupported method '" + m + "'");
    }
    return m;
}

std::size_t positive_count(const json& options, const char* key, std::size_t fallback) {
    const auto v = opt<std::int64_t>(options, key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw Error(ErrorCode::InvalidArgument, std::string("option '") + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

std::vector<int> class_labels(const FeatureMatrix& m, const FeatureSchema& schema) {
    const auto kind = schema.target.kind;
    if (kind != TargetSpec::Kind::Tag && kind != TargetSpec::Kind::Categorical) {
        throw Error(ErrorCode::InvalidArgument, "training needs a tag or categorical target");
    }
    std::vector<int> y;
    y.reserve(m.target.size());
    for (double v : m.target) y.push_back(static_cast<int>(v));  // -1 for an unseen class
    return y;
}

std::vector<std::string> keys_of(const std::vector<TripleEntryRecord>& records) {
    std::vector<std::string> keys;
    keys.reserve(records.size());
    for (const auto& r : records) keys.push_back(r.reference_key());
    return keys;
}

json evaluate(const json& model, const Matrix& x, std::span<const int> y, const std::vector<std::size_t>& rows);

}  // namespace

json encode_records(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema) {
    const FeatureMatrix m = transform(records, schema);
    json rows = json::array();
    for (std::size_t r = 0; r < m.values.rows(); ++r) {
        rows.push_back(std::vector<double>(m.values.row(r).begin(), m.values.row(r).end()));
    }
    json out{{"columns", m.columns}, {"rows", rows}, {"reference_keys", keys_of(records)}};
    out["target"] = m.target.empty() ? json(nullptr) : json(m.target);
    return out;
}

namespace {

std::vector<double> model_scores(const json& model, const Matrix& x) {
    std::vector<double> scores;
    scores.reserve(x.rows());
    const auto method = model.at("method").get<std::string>();
    if (method == "logistic") {
        const LogisticModel lm = logistic_from_json(model.at("model"));
        if (lm.weights.size() != x.cols() + 1) throw Error(ErrorCode::LengthMismatch, "model width differs from schema");
        for (std::size_t i = 0; i < x.rows(); ++i) scores.push_back(predict_probability(lm, x.row(i)));
    } else if (method == "tree") {
        const DecisionTree tree = decision_tree_from_json(model.at("model"));
        if (tree.num_features != x.cols()) throw Error(ErrorCode::LengthMismatch, "model width differs from schema");
        for (std::size_t i = 0; i < x.rows(); ++i) scores.push_back(tree_positive_probability(tree, x.row(i)));
    } else {
        throw Error(ErrorCode::InvalidArgument, "unsupported model method '" + method + "'");
    }
    return scores;
}

std::vector<int> model_classes(const json& model, const Matrix& x) {
    std::vector<int> out;
    out.reserve(x.rows());
    if (model.at("method") == "tree") {
        const DecisionTree tree = decision_tree_from_json(model.at("model"));
        for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(tree_predict(tree, x.row(i)));
    } else {
        for (double p : model_scores(model, x)) out.push_back(p >= 0.5 ? 1 : 0);
    }
    return out;
}

json evaluate(const json& model, const Matrix& x, std::span<const int> y, const std::vector<std::size_t>& rows) {
    const Matrix sub = x.select_rows(rows);
    std::vector<int> truth;
    for (std::size_t r : rows) truth.push_back(y[r]);
    const auto predicted = model_classes(model, sub);
    json out;
    out["rows"] = rows.size();
    if (rows.empty()) return out;
    const std::set<int> classes(truth.begin(), truth.end());
    const bool binary = std::all_of(truth.begin(), truth.end(), [](int v) { return v == 0 || v == 1; });
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
    out["accuracy"] = static_cast<double>(correct) / static_cast<double>(truth.size());
    if (binary) {
        const auto m = classification_metrics(truth, predicted);
        out["precision"] = m.precision;
        out["recall"] = m.recall;
        out["f1"] = m.f1;
        out["auc"] = classes.size() == 2 ? json(roc_auc(truth, model_scores(model, sub))) : json(nullptr);
    }
    return out;
}

}  // namespace

json train_model(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema, const json& options) {
    check_keys(options, {"method", "seed", "test_fraction", "learning_rate", "max_iterations", "l2", "max_depth",
                         "min_samples_split"});
    const std::string method = method_of(options, {"logistic", "tree"});
    const auto seed = opt<std::uint64_t>(options, "seed", 0);
    const double test_fraction = opt<double>(options, "test_fraction", 0.0);

    const FeatureMatrix m = transform(records, schema);
    const std::vector<int> y = class_labels(m, schema);

    std::vector<std::size_t> train_rows(records.size());
    std::iota(train_rows.begin(), train_rows.end(), 0);
    std::vector<std::size_t> test_rows;
    if (test_fraction != 0.0) {
        Split split = train_test_split(records.size(), test_fraction, seed);
        train_rows = std::move(split.train);
        test_rows = std::move(split.test);
    }
    const Matrix x_train = m.values.select_rows(train_rows);
    std::vector<int> y_train;
    for (std::size_t r : train_rows) y_train.push_back(y[r]);

    json model{{"method", method}, {"columns", m.columns}};
    if (method == "logistic") {
        if (schema.target.kind == TargetSpec::Kind::Categorical && schema.target.classes.size() != 2) {
            throw Error(ErrorCode::InvalidArgument, "logistic regression needs a two-class target");
        }
        LogisticConfig config;
        config.seed = seed;
        config.learning_rate = opt<double>(options, "learning_rate", config.learning_rate);
        config.max_iterations = positive_count(options, "max_iterations", config.max_iterations);
        config.l2 = opt<double>(options, "l2", config.l2);
        model["model"] = to_json(train_logistic(x_train, y_train, config));
    } else {
        TreeConfig config;
        config.max_depth = positive_count(options, "max_depth", config.max_depth);
        config.min_samples_split = positive_count(options, "min_samples_split", config.min_samples_split);
        model["model"] = to_json(train_decision_tree(x_train, y_train, config));
    }

    json out{{"model", model}};
    out["train_metrics"] = evaluate(model, m.values, y, train_rows);
    out["test_metrics"] = test_rows.empty() ? json(nullptr) : evaluate(model, m.values, y, test_rows);
    out["split"] = {{"train", train_rows.size()}, {"test", test_rows.size()}, {"test_fraction", test_fraction}};
    return out;
}

json predict_model(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema, const json& model) {
    try {
        const FeatureMatrix m = transform(records, schema);
        return json{{"reference_keys", keys_of(records)},
                    {"scores", model_scores(model, m.values)},
                    {"classes", model_classes(model, m.values)}};
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("model document: ") + e.what());
    }
}

json detect_anomalies(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema,
                      const json& options) {
    check_keys(options, {"method", "seed", "trees", "subsample", "k", "threshold"});
    const std::string method = method_of(options, {"iforest", "lof"});
    const FeatureMatrix m = transform(records, schema);
    AnomalyReport report;
    if (method == "iforest") {
        IsolationForestConfig config;
        config.seed = opt<std::uint64_t>(options, "seed", config.seed);
        config.trees = positive_count(options, "trees", config.trees);
        config.subsample = positive_count(options, "subsample", config.subsample);
        config.threshold = opt<double>(options, "threshold", config.threshold);
        report = isolation_forest_scores(m.values, config);
    } else {
        LofConfig config;
        config.k = positive_count(options, "k", config.k);
        config.threshold = opt<double>(options, "threshold", config.threshold);
        report = lof_scores(m.values, config);
    }
    json out = to_json(report);
    json flagged_keys = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (report.flagged[i]) flagged_keys.push_back(records[i].reference_key());
    }
    out["flagged_keys"] = flagged_keys;
    out["columns"] = m.columns;
    return out;
}

json cluster_records(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema,
                     const json& options) {
    check_keys(options, {"method", "k", "seed", "max_iterations", "eps", "min_pts"});
    const std::string method = method_of(options, {"kmeans", "dbscan"});
    const FeatureMatrix m = transform(records, schema);
    ClusterAssignment a;
    if (method == "kmeans") {
        a = kmeans(m.values, positive_count(options, "k", 2), opt<std::uint64_t>(options, "seed", 0),
                   positive_count(options, "max_iterations", 300));
    } else {
        const double eps = opt<double>(options, "eps", 0.5);
        const std::size_t min_pts = positive_count(options, "min_pts", 5);
        if (!(eps > 0.0) || min_pts < 1) throw Error(ErrorCode::InvalidArgument, "dbscan needs eps > 0 and min_pts >= 1");
        a = dbscan(m.values, eps, min_pts);
    }
    json out = to_json(a);
    out["method"] = method;
    std::set<int> distinct;
    for (int l : a.labels) {
        if (l >= 0) distinct.insert(l);
    }
    out["silhouette"] = distinct.size() >= 2 ? json(silhouette_score(m.values, a.labels)) : json(nullptr);
    out["reference_keys"] = keys_of(records);
    return out;
}

json mine_records(const std::vector<TripleEntryRecord>& records, const json& options) {
    check_keys(options, {"method", "min_support", "min_confidence"});
    const std::string method = method_of(options, {"apriori", "eclat"});
    const double min_support = opt<double>(options, "min_support", 0.05);
    const double min_confidence = opt<double>(options, "min_confidence", 0.6);
    const TransactionDB db = transactions_from_records(records);
    const FrequentItemsets frequent =
        method == "apriori" ? frequent_itemsets_apriori(db, min_support) : frequent_itemsets_eclat(db, min_support);
    return json{{"method", method},
                {"transactions", db.size()},
                {"min_support_count", min_support_count(min_support, db.size())},
                {"itemsets", itemsets_to_json(frequent, db.size())},
                {"rules", rules_to_json(generate_rules(frequent, db.size(), min_confidence))}};
}

json forecast_records(const std::vector<TripleEntryRecord>& records, const json& options) {
    check_keys(options, {"horizon"});
    std::map<std::int64_t, std::int64_t> daily;  // day index -> total
    std::string currency;
    std::optional<std::int64_t> first_day;
    for (const auto& r : records) {
        const std::string c = r.currency();
        if (c.empty() || c == kNoCurrency) continue;
        if (currency.empty()) currency = c;
        if (c != currency) throw Error(ErrorCode::CurrencyMismatch, "forecast needs a single currency");
        const std::int64_t secs = parse_rfc3339(r.metadata().occurred_at).epoch_seconds;
        const std::int64_t day = secs >= 0 ? secs / 86400 : -((-secs + 86399) / 86400);
        daily[day] += r.total();
        if (!first_day || day < *first_day) first_day = day;
    }
    std::vector<double> t, y;
    json points = json::array();
    for (const auto& [day, total] : daily) {
        const auto idx = day - *first_day;
        t.push_back(static_cast<double>(idx));
        y.push_back(static_cast<double>(total));
        points.push_back({{"t", idx}, {"total", total}});
    }
    const double horizon = opt<double>(options, "horizon", t.empty() ? 0.0 : t.back() + 1.0);
    json out = to_json(linear_forecast(t, y, horizon));
    out["currency"] = currency;
    out["points"] = points;
    out["origin"] = first_day ? json(format_rfc3339(Timestamp{*first_day * 86400})) : json(nullptr);
    return out;
}

}  // namespace tel
