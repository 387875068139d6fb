#include "tel/feature_selection.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "tel/decision_tree.hpp"
#include "tel/error.hpp"
#include "tel/logistic.hpp"

namespace tel {

std::vector<double> anova_f_scores(const Matrix& x, std::span<const int> y) {
    if (y.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "one label per row required");
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < y.size(); ++i) groups[y[i]].push_back(i);
    if (groups.size() < 2) throw Error(ErrorCode::SingleClass, "ANOVA needs at least two classes");
    const std::size_t n = x.rows();
    const std::size_t k = groups.size();
    if (n <= k) throw Error(ErrorCode::TooFewRows, "ANOVA needs more rows than classes");
    check_finite(x);

    std::vector<double> scores(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i) grand += x(i, c);
        grand /= static_cast<double>(n);
        double ssb = 0.0;
        double ssw = 0.0;
        for (const auto& [label, rows] : groups) {
            double mean = 0.0;
            for (std::size_t i : rows) mean += x(i, c);
            mean /= static_cast<double>(rows.size());
            ssb += static_cast<double>(rows.size()) * (mean - grand) * (mean - grand);
            for (std::size_t i : rows) ssw += (x(i, c) - mean) * (x(i, c) - mean);
        }
        if (ssw == 0.0) {
            scores[c] = ssb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
            continue;
        }
        const double df_between = static_cast<double>(k - 1);
        const double df_within = static_cast<double>(n - k);
        scores[c] = (ssb / df_between) / (ssw / df_within);
    }
    return scores;
}

std::vector<double> logistic_importance(const Matrix& x, std::span<const int> y, std::uint64_t seed) {
    LogisticConfig config;
    config.seed = seed;
    const LogisticModel model = train_logistic(x, y, config);
    std::vector<double> out;
    out.reserve(x.cols());
    for (std::size_t i = 1; i < model.weights.size(); ++i) out.push_back(std::abs(model.weights[i]));
    return out;
}

std::vector<double> tree_importance(const Matrix& x, std::span<const int> y, std::uint64_t) {
    return train_decision_tree(x, y, TreeConfig{}).feature_importance;
}

std::vector<std::string> recursive_feature_elimination(const Matrix& x, std::span<const int> y,
                                                       const std::vector<std::string>& names, std::size_t keep,
                                                       const ImportanceFn& trainer, std::uint64_t seed) {
    if (names.size() != x.cols()) throw Error(ErrorCode::LengthMismatch, "one name per column required");
    if (keep < 1 || keep > x.cols()) throw Error(ErrorCode::KeepOutOfRange, "keep must lie in [1, columns]");

    std::vector<std::size_t> alive(x.cols());
    std::iota(alive.begin(), alive.end(), 0);
    while (alive.size() > keep) {
        const std::vector<double> importance = trainer(x.select_cols(alive), y, seed);
        if (importance.size() != alive.size()) {
            throw Error(ErrorCode::InvalidArgument, "trainer returned the wrong number of importances");
        }
        std::size_t worst = 0;
        for (std::size_t i = 1; i < alive.size(); ++i) {
            if (importance[i] < importance[worst] ||
                (importance[i] == importance[worst] && names[alive[i]] < names[alive[worst]])) {
                worst = i;
            }
        }
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    std::vector<std::string> out;
    out.reserve(alive.size());
    for (std::size_t i : alive) out.push_back(names[i]);
    return out;
}

}  // namespace tel
