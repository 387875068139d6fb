#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "tel/features.hpp"
#include "tel/record.hpp"

namespace tel {

// Record-level entry points shared by the C API and the command line. Each
// takes an options object; unknown option keys are rejected with
// InvalidArgument so that typos do not silently fall back to defaults.

/// {columns, rows: [[...]], target}
nlohmann::json encode_records(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema);

/// options: method ("logistic" | "tree"), seed, test_fraction (0 trains and
/// scores on every row), learning_rate, max_iterations, l2, max_depth,
/// min_samples_split. The schema must carry a tag or categorical target;
/// logistic needs exactly two classes.
nlohmann::json train_model(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema,
                           const nlohmann::json& options);

/// Scores records with a model document produced by train_model.
nlohmann::json predict_model(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema,
                             const nlohmann::json& model);

/// options: method ("iforest" | "lof"), seed, trees, subsample, k, threshold.
nlohmann::json detect_anomalies(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema,
                                const nlohmann::json& options);

/// options: method ("kmeans" | "dbscan"), k, seed, max_iterations, eps, min_pts.
nlohmann::json cluster_records(const std::vector<TripleEntryRecord>& records, const FeatureSchema& schema,
                               const nlohmann::json& options);

/// options: method ("apriori" | "eclat"), min_support, min_confidence.
nlohmann::json mine_records(const std::vector<TripleEntryRecord>& records, const nlohmann::json& options);

/// Daily totals in minor units against t = whole days since the first
/// record's UTC day, fitted by least squares. options: horizon (a day index;
/// defaults to the day after the last observation). XXX records are skipped.
nlohmann::json forecast_records(const std::vector<TripleEntryRecord>& records, const nlohmann::json& options);

}  // namespace tel
