#include "tel/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tel/error.hpp"
#include "tel/logistic.hpp"
#include "tel/rng.hpp"

namespace tel {

namespace {

constexpr double kLrdFloor = 1e-12;

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::size_t height_limit, Rng& rng, IsolationTree& tree)
        : x_(x), height_limit_(height_limit), rng_(rng), tree_(tree) {}

    int build(std::vector<std::size_t> rows, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(IsolationNode{-1, 0.0, -1, -1, rows.size()});
        if (rows.size() <= 1 || depth >= height_limit_) return id;

        std::vector<std::size_t> varying;
        std::vector<std::pair<double, double>> ranges;
        for (std::size_t f = 0; f < x_.cols(); ++f) {
            double lo = x_(rows[0], f);
            double hi = lo;
            for (std::size_t r : rows) {
                lo = std::min(lo, x_(r, f));
                hi = std::max(hi, x_(r, f));
            }
            if (hi > lo) {
                varying.push_back(f);
                ranges.emplace_back(lo, hi);
            }
        }
        if (varying.empty()) return id;

        const std::size_t pick = rng_.uniform_below(varying.size());
        const std::size_t feature = varying[pick];
        const auto [lo, hi] = ranges[pick];
        const double split = rng_.uniform(lo, hi);

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (std::size_t r : rows) (x_(r, feature) < split ? left : right).push_back(r);

        const int left_id = build(std::move(left), depth + 1);
        const int right_id = build(std::move(right), depth + 1);
        IsolationNode& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(feature);
        node.split = split;
        node.left = left_id;
        node.right = right_id;
        return id;
    }

private:
    const Matrix& x_;
    std::size_t height_limit_;
    Rng& rng_;
    IsolationTree& tree_;
};

std::vector<bool> flag(const std::vector<double>& scores, double threshold) {
    std::vector<bool> out;
    out.reserve(scores.size());
    for (double s : scores) out.push_back(s >= threshold);
    return out;
}

}  // namespace

double average_path_length(std::size_t n) noexcept {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    double harmonic = 0.0;
    for (std::size_t i = 1; i <= n - 1; ++i) harmonic += 1.0 / static_cast<double>(i);
    const double nd = static_cast<double>(n);
    return 2.0 * harmonic - 2.0 * (nd - 1.0) / nd;
}

IsolationForest IsolationForest::fit(const Matrix& x, const IsolationForestConfig& config) {
    if (x.rows() < 2) throw Error(ErrorCode::TooFewRows, "isolation forest needs at least 2 rows");
    if (config.trees == 0 || config.subsample < 2) {
        throw Error(ErrorCode::InvalidArgument, "isolation forest needs trees >= 1 and subsample >= 2");
    }
    check_finite(x);
    IsolationForest forest;
    forest.config_ = config;
    forest.features_ = x.cols();
    forest.subsample_ = std::min(config.subsample, x.rows());
    const auto height_limit = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(forest.subsample_))));
    forest.trees_.resize(config.trees);
    for (std::size_t t = 0; t < config.trees; ++t) {
        Rng rng(derive_seed(config.seed, t));
        auto rows = rng.sample_without_replacement(x.rows(), forest.subsample_);
        TreeBuilder(x, height_limit, rng, forest.trees_[t]).build(std::move(rows), 0);
    }
    return forest;
}

double IsolationForest::path_length(const IsolationTree& tree, std::span<const double> row) const {
    if (row.size() != features_) throw Error(ErrorCode::LengthMismatch, "row width differs from forest");
    std::size_t edges = 0;
    const IsolationNode* node = &tree.nodes[0];
    while (node->feature >= 0) {
        const int next = row[static_cast<std::size_t>(node->feature)] < node->split ? node->left : node->right;
        node = &tree.nodes[static_cast<std::size_t>(next)];
        ++edges;
    }
    return static_cast<double>(edges) + average_path_length(node->size);
}

double IsolationForest::mean_path_length(std::span<const double> row) const {
    double total = 0.0;
    for (const auto& tree : trees_) total += path_length(tree, row);
    return total / static_cast<double>(trees_.size());
}

double IsolationForest::score(std::span<const double> row) const {
    return std::exp2(-mean_path_length(row) / average_path_length(subsample_));
}

AnomalyReport isolation_forest_scores(const Matrix& x, const IsolationForestConfig& config) {
    const IsolationForest forest = IsolationForest::fit(x, config);
    AnomalyReport report;
    report.method = "isolation_forest";
    report.threshold = config.threshold;
    report.scores.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) report.scores.push_back(forest.score(x.row(i)));
    report.flagged = flag(report.scores, config.threshold);
    return report;
}

AnomalyReport lof_scores(const Matrix& x, const LofConfig& config) {
    const std::size_t n = x.rows();
    const std::size_t k = config.k;
    if (k < 1 || n < k + 1) {
        throw Error(ErrorCode::KOutOfRange, "LOF needs 1 <= k and at least k + 1 rows");
    }
    check_finite(x);

    // Neighbour lists sorted by distance, truncated after the k-distance ties.
    std::vector<std::vector<std::pair<double, std::size_t>>> neighbours(n);
    std::vector<double> k_distance(n);
    std::vector<std::pair<double, std::size_t>> all;
    all.reserve(n - 1);
    for (std::size_t p = 0; p < n; ++p) {
        all.clear();
        for (std::size_t q = 0; q < n; ++q) {
            if (q != p) all.emplace_back(euclidean_distance(x.row(p), x.row(q)), q);
        }
        std::sort(all.begin(), all.end());
        k_distance[p] = all[k - 1].first;
        std::size_t end = k;
        while (end < all.size() && all[end].first <= k_distance[p]) ++end;
        neighbours[p].assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(end));
    }

    std::vector<double> lrd(n);
    for (std::size_t p = 0; p < n; ++p) {
        double reach_sum = 0.0;
        for (const auto& [d, o] : neighbours[p]) reach_sum += std::max(k_distance[o], d);
        const double mean_reach = reach_sum / static_cast<double>(neighbours[p].size());
        lrd[p] = 1.0 / std::max(mean_reach, kLrdFloor);
    }

    AnomalyReport report;
    report.method = "lof";
    report.threshold = config.threshold;
    report.scores.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        double ratio_sum = 0.0;
        for (const auto& [d, o] : neighbours[p]) ratio_sum += lrd[o];
        report.scores[p] = ratio_sum / (static_cast<double>(neighbours[p].size()) * lrd[p]);
    }
    report.flagged = flag(report.scores, config.threshold);
    return report;
}

nlohmann::json to_json(const AnomalyReport& report) {
    std::vector<std::size_t> flagged_rows;
    for (std::size_t i = 0; i < report.flagged.size(); ++i) {
        if (report.flagged[i]) flagged_rows.push_back(i);
    }
    return nlohmann::json{{"method", report.method},
                          {"threshold", report.threshold},
                          {"scores", report.scores},
                          {"flagged_rows", flagged_rows},
                          {"flagged_count", flagged_rows.size()}};
}

}  // namespace tel
