#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/matrix.hpp"

namespace tel {

struct LogisticConfig {
    double learning_rate = 0.1;
    std::size_t max_iterations = 1000;
    double l2 = 0.0;
    std::uint64_t seed = 0;
    double gradient_tolerance = 1e-8;
    bool record_loss = false;  // keep the loss before every step in loss_history
};

/// weights[0] is the bias.
struct LogisticModel {
    std::vector<double> weights;
    LogisticConfig config;
    std::size_t iterations = 0;
    std::vector<double> loss_history;
};

/// Mean log loss plus (l2 / 2) * sum of squared non-bias weights.
double logistic_loss(std::span<const double> weights, const Matrix& x, std::span<const int> y, double l2);

/// Analytic gradient of logistic_loss.
std::vector<double> logistic_gradient(std::span<const double> weights, const Matrix& x, std::span<const int> y,
                                      double l2);

/// Batch gradient descent from zero weights; stops at max_iterations or when
/// the gradient's infinity norm drops below the tolerance. The seed is
/// recorded but no step is random.
/// Throws TooFewRows, SingleClass, NonFiniteFeature, LengthMismatch.
LogisticModel train_logistic(const Matrix& x, std::span<const int> y, const LogisticConfig& config);

double sigmoid(double z) noexcept;
double predict_probability(const LogisticModel& model, std::span<const double> row);
int predict_class(const LogisticModel& model, std::span<const double> row);

nlohmann::json to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const nlohmann::json& j);

/// Checks a 0/1 label vector against a matrix; shared by the classifiers.
void check_binary_labels(const Matrix& x, std::span<const int> y);
void check_finite(const Matrix& x);

}  // namespace tel
