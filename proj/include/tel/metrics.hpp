#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/matrix.hpp"

namespace tel {

struct ClassificationMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Binary labels, 1 = positive. Ratios with a zero denominator are 0.
/// Throws LengthMismatch, EmptyInput.
ClassificationMetrics classification_metrics(std::span<const int> y_true, std::span<const int> y_pred);

/// Mann-Whitney AUC using average ranks, so tied scores count 1/2.
/// Throws SingleClass, LengthMismatch.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

/// Mean of (b - a) / max(a, b). Points in singleton clusters contribute 0.
/// Noise points (label -1) are left out entirely.
/// Throws SingleCluster (fewer than two clusters), LengthMismatch.
double silhouette_score(const Matrix& x, std::span<const int> labels);

struct Split {
    std::vector<std::size_t> train;  // row indices
    std::vector<std::size_t> test;
};

/// Seeded shuffle of row indices; the test part has llround(fraction * n) rows.
/// Throws FractionOutOfRange unless 0 < fraction < 1.
Split train_test_split(std::size_t rows, double test_fraction, std::uint64_t seed);

struct LinearForecast {
    double slope = 0.0;
    double intercept = 0.0;
    double horizon = 0.0;
    double prediction = 0.0;
};

/// Ordinary least squares of value on t, evaluated at horizon.
/// Throws DegenerateTimeAxis with fewer than two distinct t, LengthMismatch.
LinearForecast linear_forecast(std::span<const double> t, std::span<const double> values, double horizon);

nlohmann::json to_json(const ClassificationMetrics& m);
nlohmann::json to_json(const LinearForecast& f);

}  // namespace tel
