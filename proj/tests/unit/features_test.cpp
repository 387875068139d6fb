#include <gtest/gtest.h>

#include <cmath>

#include "../support/fixtures.hpp"
#include "tel/error.hpp"
#include "tel/feature_selection.hpp"
#include "tel/features.hpp"

namespace tel {
namespace {

using testing::make_record;

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

TEST(OneHot, Examples) {
    EXPECT_EQ(encode_one_hot("B", {"A", "B", "C"}), (std::vector<double>{0, 1, 0, 0}));
    EXPECT_EQ(encode_one_hot("D", {"A", "B", "C"}), (std::vector<double>{0, 0, 0, 1}));
    EXPECT_EQ(encode_one_hot("A", {"A"}), (std::vector<double>{1, 0}));
}

TEST(OneHot, ExactlyOneNonzero) {
    const std::vector<std::string> cats{"LA", "NY", "SF", "__missing__"};
    for (const std::string v : {"LA", "NY", "SF", "__missing__", "Boston", ""}) {
        const auto e = encode_one_hot(v, cats);
        ASSERT_EQ(e.size(), cats.size() + 1);
        int ones = 0;
        for (double x : e) {
            EXPECT_TRUE(x == 0.0 || x == 1.0);
            ones += x == 1.0;
        }
        EXPECT_EQ(ones, 1) << v;
    }
}

TEST(TimeDelta, Examples) {
    EXPECT_EQ(encode_time_delta("2024-01-11T00:00:00Z", "2024-01-01T00:00:00Z"), 10);
    EXPECT_EQ(encode_time_delta("2024-01-01T00:00:00Z", "2024-01-01T00:00:00Z"), 0);
    EXPECT_EQ(encode_time_delta("2023-12-31T00:00:00Z", "2024-01-01T00:00:00Z"), -1);
    EXPECT_EQ(encode_time_delta("2023-12-31T23:59:59Z", "2024-01-01T00:00:00Z"), -1);
    EXPECT_EQ(encode_time_delta("2024-01-01T23:59:59Z", "2024-01-01T00:00:00Z"), 0);
    EXPECT_THROW(
        {
            try {
                encode_time_delta("yesterday", "2024-01-01T00:00:00Z");
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), ErrorCode::UnparseableTimestamp);
                throw;
            }
        },
        Error);
}

TEST(Tfidf, IdfValues) {
    const TfidfSpec spec = fit_tfidf({"cash sale", "cash refund"});
    ASSERT_EQ(spec.vocabulary, (std::vector<std::string>{"cash", "refund", "sale"}));
    EXPECT_DOUBLE_EQ(spec.idf[0], std::log(3.0 / 3.0) + 1.0);
    EXPECT_NEAR(spec.idf[2], 1.405465, 1e-6);
    EXPECT_DOUBLE_EQ(spec.idf[2], std::log(3.0 / 2.0) + 1.0);
}

TEST(Tfidf, EncodingAndNorms) {
    const TfidfSpec spec = fit_tfidf({"cash sale", "cash refund"});
    EXPECT_EQ(encode_text_tfidf("", spec), (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(encode_text_tfidf("wire transfer!", spec), (std::vector<double>{0, 0, 0}));

    // "Cash, cash SALE" -> tf(cash)=2, tf(sale)=1.
    const auto v = encode_text_tfidf("Cash, cash SALE", spec);
    const double a = 2.0 * 1.0;
    const double b = 1.0 * (std::log(1.5) + 1.0);
    const double n = std::sqrt(a * a + b * b);
    EXPECT_NEAR(v[0], a / n, 1e-12);
    EXPECT_EQ(v[1], 0.0);
    EXPECT_NEAR(v[2], b / n, 1e-12);

    for (const std::string doc : {"cash", "refund sale", "x y z", "", "sale sale sale cash"}) {
        const double norm = l2_norm(encode_text_tfidf(doc, spec));
        EXPECT_TRUE(norm == 0.0 || std::abs(norm - 1.0) <= 1e-12) << doc;
    }
}

TEST(Tokenize, SplitsOnNonAlphanumerics) {
    EXPECT_EQ(tokenize("Coffee-beans x2, 5kg"), (std::vector<std::string>{"coffee", "beans", "x2", "5kg"}));
    EXPECT_TRUE(tokenize(" ,;- ").empty());
}

TEST(MinMax, Examples) {
    const NumericSpec fitted = fit_numeric({0.0, 5.0, 10.0});
    EXPECT_EQ(fitted.min, 0.0);
    EXPECT_EQ(fitted.max, 10.0);
    EXPECT_EQ(fitted.mean, 5.0);
    EXPECT_EQ(normalize_minmax({0, 5, 10}, fitted), (std::vector<double>{0, 0.5, 1}));
    const NumericSpec constant = fit_numeric({7.0, 7.0});
    EXPECT_EQ(normalize_minmax({7, 7}, constant), (std::vector<double>{0, 0}));
    EXPECT_EQ(normalize_minmax({20}, fitted), (std::vector<double>{1.0}));
    EXPECT_EQ(normalize_minmax({-3}, fitted), (std::vector<double>{0.0}));
}

TEST(MinMax, AlwaysInUnitInterval) {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        NumericColumn col;
        for (int i = 0; i < 5; ++i) col.push_back(rng.uniform(-100, 100));
        const NumericSpec spec = fit_numeric(col);
        std::vector<double> probe;
        for (int i = 0; i < 20; ++i) probe.push_back(rng.uniform(-300, 300));
        for (double v : normalize_minmax(probe, spec)) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Impute, NumericAndCategorical) {
    const NumericColumn col{1.0, std::nullopt, 3.0};
    const NumericSpec spec = fit_numeric(col);
    EXPECT_EQ(spec.mean, 2.0);
    EXPECT_EQ(impute_numeric(col, spec), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(impute_categorical({std::string("NY"), std::nullopt}),
              (std::vector<std::string>{"NY", "__missing__"}));
    try {
        fit_numeric({std::nullopt, std::nullopt});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AllMissingNumericColumn);
    }
}

std::vector<TripleEntryRecord> three_records() {
    auto a = make_record("K1", "A", "B", 0);
    auto b = make_record("K2", "A", "C", 500);
    auto c = make_record("K3", "B", "C", 1000);
    a.debits[0].amount.minor_units = 0;
    a.credits[0].amount.minor_units = 0;
    a.third.metadata.location = "NY";
    b.third.metadata.location = "LA";
    c.third.metadata.location = "NY";
    return {a, b, c};
}

TEST(FitSchema, Examples) {
    const RecordTable table = extract_table(three_records());
    FeatureConfig config;
    config.roles = {{"location", FieldRole::Categorical},
                    {"currency", FieldRole::Categorical},
                    {"amount", FieldRole::Numeric},
                    {"reference_key", FieldRole::Identifier}};
    const FeatureSchema schema = fit_schema(table, config);
    ASSERT_EQ(schema.columns.size(), 2u);  // currency dropped as constant
    EXPECT_EQ(schema.dropped_constant, (std::vector<std::string>{"currency"}));
    const auto& amount = std::get<NumericSpec>(schema.columns[0].kind);
    EXPECT_EQ(amount.min, 0.0);
    EXPECT_EQ(amount.max, 1000.0);
    EXPECT_EQ(amount.mean, 500.0);
    const auto& loc = std::get<OneHotSpec>(schema.columns[1].kind);
    EXPECT_EQ(loc.categories, (std::vector<std::string>{"LA", "NY"}));
    EXPECT_EQ(schema.column_names(),
              (std::vector<std::string>{"amount", "location=LA", "location=NY", "location=__unknown__"}));
}

TEST(FitSchema, EmptyInput) {
    try {
        fit_schema(std::vector<TripleEntryRecord>{}, FeatureConfig::defaults());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
}

TEST(Transform, MissingCategoryAndUnseenValues) {
    auto records = three_records();
    records[1].third.metadata.location.reset();
    FeatureConfig config;
    config.roles = {{"location", FieldRole::Categorical}};
    const FeatureSchema schema = fit_schema(records, config);
    EXPECT_EQ(std::get<OneHotSpec>(schema.columns[0].kind).categories,
              (std::vector<std::string>{"NY", "__missing__"}));
    records[2].third.metadata.location = "Tokyo";
    const FeatureMatrix m = transform(records, schema);
    EXPECT_EQ(std::vector<double>(m.values.row(1).begin(), m.values.row(1).end()), (std::vector<double>{0, 1, 0}));
    EXPECT_EQ(std::vector<double>(m.values.row(2).begin(), m.values.row(2).end()), (std::vector<double>{0, 0, 1}));
}

TEST(Transform, TagTargetAndTimeColumn) {
    auto records = three_records();
    records[0].third.metadata.tags = {"refund"};
    records[2].third.metadata.occurred_at = "2024-01-05T08:00:00Z";
    FeatureConfig config;
    config.roles = {{"occurred_at", FieldRole::Time}};
    config.target = "tag:refund";
    const FeatureMatrix m = transform(records, fit_schema(records, config));
    EXPECT_EQ(m.target, (std::vector<double>{1, 0, 0}));
    EXPECT_EQ(m.values.column(0), (std::vector<double>{0, 0, 3}));  // reference is 12:00 on day 0
}

// Random batches with missing metadata: no NaN, width as the schema predicts.
TEST(Pipeline, NoNanAndPredictedWidth) {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<TripleEntryRecord> records;
        const std::size_t n = 1 + rng.uniform_below(25);
        for (std::size_t i = 0; i < n; ++i) records.push_back(testing::random_record(rng, "R" + std::to_string(i)));
        const FeatureSchema schema = fit_schema(records, FeatureConfig::defaults());
        std::size_t expected = 0;
        for (const auto& c : schema.columns) expected += c.width();
        EXPECT_EQ(schema.width(), expected);

        std::vector<TripleEntryRecord> fresh;
        for (std::size_t i = 0; i < 10; ++i) fresh.push_back(testing::random_record(rng, "F" + std::to_string(i)));
        for (const auto* batch : {&records, &fresh}) {
            const FeatureMatrix m = transform(*batch, schema);
            EXPECT_EQ(m.values.cols(), expected);
            EXPECT_EQ(m.columns.size(), expected);
            for (double v : m.values.data()) EXPECT_FALSE(std::isnan(v));
        }
    }
}

TEST(Schema, JsonRoundTrip) {
    Rng rng(5);
    std::vector<TripleEntryRecord> records;
    for (int i = 0; i < 20; ++i) records.push_back(testing::random_record(rng, "R" + std::to_string(i)));
    FeatureConfig config = FeatureConfig::defaults();
    config.target = "tag:refund";
    const FeatureSchema schema = fit_schema(records, config);
    const FeatureSchema back = schema_from_json(nlohmann::json::parse(to_json(schema).dump()));
    EXPECT_EQ(to_json(back), to_json(schema));
    EXPECT_EQ(transform(records, back).values, transform(records, schema).values);
}

TEST(Anova, Examples) {
    const Matrix x = Matrix::from_rows({{1, 0, 5}, {2, 0, 6}, {3, 1, 5}, {4, 1, 6}});
    const std::vector<int> y{0, 0, 1, 1};
    const auto f = anova_f_scores(x, y);
    EXPECT_DOUBLE_EQ(f[0], 8.0);
    EXPECT_TRUE(std::isinf(f[1]) && f[1] > 0);
    EXPECT_EQ(f[2], 0.0);
    try {
        anova_f_scores(x, std::vector<int>{1, 1, 1, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingleClass);
    }
}

TEST(Anova, ShiftInvariantAndNonnegative) {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> rows;
        std::vector<int> y;
        for (int i = 0; i < 12; ++i) {
            rows.push_back({rng.normal(0, 1), rng.normal(i % 3, 2)});
            y.push_back(i % 3);
        }
        const double shift = rng.uniform(-50, 50);
        auto shifted = rows;
        for (auto& r : shifted) {
            for (double& v : r) v += shift;
        }
        const auto a = anova_f_scores(Matrix::from_rows(rows), y);
        const auto b = anova_f_scores(Matrix::from_rows(shifted), y);
        for (std::size_t c = 0; c < a.size(); ++c) {
            EXPECT_GE(a[c], 0.0);
            EXPECT_NEAR(a[c], b[c], 1e-9 * std::max(1.0, a[c]));
        }
    }
}

struct RfeData {
    Matrix x;
    std::vector<int> y;
};

RfeData informative_plus_constant() {
    Rng rng(42);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        const double a = rng.normal(0, 1);
        const double b = rng.normal(0, 1);
        rows.push_back({a, 0.0, b});
        y.push_back(a + 0.5 * b > 0 ? 1 : 0);
    }
    return {Matrix::from_rows(rows), y};
}

TEST(Rfe, KeepAllIsIdentity) {
    const auto d = informative_plus_constant();
    const std::vector<std::string> names{"a", "zero", "b"};
    EXPECT_EQ(recursive_feature_elimination(d.x, d.y, names, 3, logistic_importance, 42), names);
}

TEST(Rfe, ConstantEliminatedFirst) {
    const auto d = informative_plus_constant();
    const std::vector<std::string> names{"a", "zero", "b"};
    // Oracle: the first round's importances put the constant strictly last.
    const auto importance = logistic_importance(d.x, d.y, 42);
    EXPECT_EQ(importance[1], 0.0);
    EXPECT_GT(importance[0], 0.0);
    EXPECT_GT(importance[2], 0.0);
    const auto kept = recursive_feature_elimination(d.x, d.y, names, 2, logistic_importance, 42);
    EXPECT_EQ(kept, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(recursive_feature_elimination(d.x, d.y, names, 2, logistic_importance, 42), kept);
    EXPECT_EQ(recursive_feature_elimination(d.x, d.y, names, 2, tree_importance, 42), kept);
}

TEST(Rfe, TiesGoToSmallestName) {
    const auto d = informative_plus_constant();
    auto flat = [](const Matrix& x, std::span<const int>, std::uint64_t) { return std::vector<double>(x.cols(), 1.0); };
    EXPECT_EQ(recursive_feature_elimination(d.x, d.y, {"m", "c", "x"}, 1, flat, 0), (std::vector<std::string>{"x"}));
}

TEST(Rfe, KeepOutOfRange) {
    const auto d = informative_plus_constant();
    for (std::size_t keep : {std::size_t{0}, std::size_t{4}}) {
        try {
            recursive_feature_elimination(d.x, d.y, {"a", "zero", "b"}, keep, logistic_importance, 42);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::KeepOutOfRange);
        }
    }
}

}  // namespace
}  // namespace tel
