#include "tel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tel/error.hpp"
#include "tel/rng.hpp"

namespace tel {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassificationMetrics classification_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) throw Error(ErrorCode::LengthMismatch, "label vectors differ in length");
    if (y_true.empty()) throw Error(ErrorCode::EmptyInput, "no labels");
    ClassificationMetrics m;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] == 1;
        const bool p = y_pred[i] == 1;
        if (t && p) ++m.tp;
        else if (!t && p) ++m.fp;
        else if (t && !p) ++m.fn;
        else ++m.tn;
    }
    m.accuracy = ratio(m.tp + m.tn, y_true.size());
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.recall = ratio(m.tp, m.tp + m.fn);
    const double pr = m.precision + m.recall;
    m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
    return m;
}

double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) throw Error(ErrorCode::LengthMismatch, "labels and scores differ in length");
    const std::size_t n = y_true.size();
    std::size_t pos = 0;
    for (int y : y_true) pos += y == 1 ? 1 : 0;
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw Error(ErrorCode::SingleClass, "AUC needs both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of average ranks (1-based) of the positives.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t r = i; r < j; ++r) {
            if (y_true[order[r]] == 1) rank_sum += avg_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(pos);
    const double u = rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(neg));
}

double silhouette_score(const Matrix& x, std::span<const int> labels) {
    if (labels.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "one label per row required");
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= 0) members[labels[i]].push_back(i);
    }
    if (members.size() < 2) throw Error(ErrorCode::SingleCluster, "silhouette needs at least two clusters");

    double total = 0.0;
    std::size_t counted = 0;
    for (const auto& [label, rows] : members) {
        for (std::size_t i : rows) {
            ++counted;
            if (rows.size() == 1) continue;
            double a = 0.0;
            for (std::size_t j : rows) a += euclidean_distance(x.row(i), x.row(j));
            a /= static_cast<double>(rows.size() - 1);
            double b = std::numeric_limits<double>::infinity();
            for (const auto& [other, other_rows] : members) {
                if (other == label) continue;
                double d = 0.0;
                for (std::size_t j : other_rows) d += euclidean_distance(x.row(i), x.row(j));
                b = std::min(b, d / static_cast<double>(other_rows.size()));
            }
            const double m = std::max(a, b);
            if (m > 0.0) total += (b - a) / m;
        }
    }
    return total / static_cast<double>(counted);
}

Split train_test_split(std::size_t rows, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::FractionOutOfRange, "test fraction must lie strictly between 0 and 1");
    }
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    const auto test_count = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows)));
    Split split;
    split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_count));
    split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_count), order.end());
    return split;
}

LinearForecast linear_forecast(std::span<const double> t, std::span<const double> values, double horizon) {
    if (t.size() != values.size()) throw Error(ErrorCode::LengthMismatch, "t and values differ in length");
    const std::size_t n = t.size();
    if (n < 2) throw Error(ErrorCode::DegenerateTimeAxis, "need at least two distinct t");
    double mean_t = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_t += t[i];
        mean_y += values[i];
    }
    mean_t /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (t[i] - mean_t) * (t[i] - mean_t);
        sxy += (t[i] - mean_t) * (values[i] - mean_y);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateTimeAxis, "all t values are equal");
    LinearForecast f;
    f.slope = sxy / sxx;
    f.intercept = mean_y - f.slope * mean_t;
    f.horizon = horizon;
    f.prediction = f.slope * horizon + f.intercept;
    return f;
}

nlohmann::json to_json(const ClassificationMetrics& m) {
    return nlohmann::json{{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                          {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
}

nlohmann::json to_json(const LinearForecast& f) {
    return nlohmann::json{
        {"slope", f.slope}, {"intercept", f.intercept}, {"horizon", f.horizon}, {"prediction", f.prediction}};
}

}  // namespace tel
