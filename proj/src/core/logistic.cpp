#include "tel/logistic.hpp"

#include <cmath>

#include "tel/error.hpp"

namespace tel {

namespace {

double linear(std::span<const double> w, std::span<const double> row) {
    double z = w[0];
    for (std::size_t j = 0; j < row.size(); ++j) z += w[j + 1] * row[j];
    return z;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_shapes(std::span<const double> w, const Matrix& x, std::span<const int> y) {
    if (y.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "labels and rows differ in length");
    if (w.size() != x.cols() + 1) throw Error(ErrorCode::LengthMismatch, "weights must have cols + 1 entries");
}

}  // namespace

double sigmoid(double z) noexcept {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_finite(const Matrix& x) {
    for (double v : x.data()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "feature matrix holds NaN or infinity");
    }
}

void check_binary_labels(const Matrix& x, std::span<const int> y) {
    if (y.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "labels and rows differ in length");
    bool zero = false;
    bool one = false;
    for (int v : y) {
        if (v == 0) zero = true;
        else if (v == 1) one = true;
        else throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    }
    if (!zero || !one) throw Error(ErrorCode::SingleClass, "both classes must be present");
}

double logistic_loss(std::span<const double> w, const Matrix& x, std::span<const int> y, double l2) {
    check_shapes(w, x, y);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double z = linear(w, x.row(i));
        // -[y log s(z) + (1 - y) log(1 - s(z))] = softplus(z) - y z
        loss += softplus(z) - (y[i] == 1 ? z : 0.0);
    }
    loss /= static_cast<double>(x.rows());
    double penalty = 0.0;
    for (std::size_t j = 1; j < w.size(); ++j) penalty += w[j] * w[j];
    return loss + 0.5 * l2 * penalty;
}

std::vector<double> logistic_gradient(std::span<const double> w, const Matrix& x, std::span<const int> y, double l2) {
    check_shapes(w, x, y);
    std::vector<double> grad(w.size(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        const double residual = sigmoid(linear(w, row)) - static_cast<double>(y[i]);
        grad[0] += residual;
        for (std::size_t j = 0; j < row.size(); ++j) grad[j + 1] += residual * row[j];
    }
    const double n = static_cast<double>(x.rows());
    for (double& g : grad) g /= n;
    for (std::size_t j = 1; j < w.size(); ++j) grad[j] += l2 * w[j];
    return grad;
}

LogisticModel train_logistic(const Matrix& x, std::span<const int> y, const LogisticConfig& config) {
    if (x.rows() < 2) throw Error(ErrorCode::TooFewRows, "logistic regression needs at least 2 rows");
    check_binary_labels(x, y);
    check_finite(x);
    if (!(config.learning_rate > 0.0) || config.l2 < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0 and l2 >= 0");
    }

    LogisticModel model;
    model.config = config;
    model.weights.assign(x.cols() + 1, 0.0);
    for (std::size_t it = 0; it < config.max_iterations; ++it) {
        if (config.record_loss) model.loss_history.push_back(logistic_loss(model.weights, x, y, config.l2));
        const auto grad = logistic_gradient(model.weights, x, y, config.l2);
        double norm = 0.0;
        for (double g : grad) norm = std::max(norm, std::abs(g));
        if (norm < config.gradient_tolerance) break;
        for (std::size_t j = 0; j < grad.size(); ++j) model.weights[j] -= config.learning_rate * grad[j];
        model.iterations = it + 1;
    }
    if (config.record_loss) model.loss_history.push_back(logistic_loss(model.weights, x, y, config.l2));
    return model;
}

double predict_probability(const LogisticModel& model, std::span<const double> row) {
    if (row.size() + 1 != model.weights.size()) throw Error(ErrorCode::LengthMismatch, "row width differs from model");
    return sigmoid(linear(model.weights, row));
}

int predict_class(const LogisticModel& model, std::span<const double> row) {
    return predict_probability(model, row) >= 0.5 ? 1 : 0;
}

nlohmann::json to_json(const LogisticModel& model) {
    return nlohmann::json{{"kind", "logistic"},
                          {"weights", model.weights},
                          {"iterations", model.iterations},
                          {"config",
                           {{"learning_rate", model.config.learning_rate},
                            {"max_iterations", model.config.max_iterations},
                            {"l2", model.config.l2},
                            {"seed", model.config.seed},
                            {"gradient_tolerance", model.config.gradient_tolerance}}}};
}

LogisticModel logistic_from_json(const nlohmann::json& j) {
    try {
        LogisticModel m;
        m.weights = j.at("weights").get<std::vector<double>>();
        m.iterations = j.value("iterations", std::size_t{0});
        const auto& c = j.at("config");
        m.config.learning_rate = c.at("learning_rate").get<double>();
        m.config.max_iterations = c.at("max_iterations").get<std::size_t>();
        m.config.l2 = c.at("l2").get<double>();
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.gradient_tolerance = c.value("gradient_tolerance", 1e-8);
        if (m.weights.empty()) throw Error(ErrorCode::Parse, "logistic model has no weights");
        for (double w : m.weights) {
            if (!std::isfinite(w)) throw Error(ErrorCode::Parse, "logistic model weight is not finite");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed logistic model: ") + e.what());
    }
}

}  // namespace tel
