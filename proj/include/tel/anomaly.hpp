#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/matrix.hpp"

namespace tel {

struct AnomalyReport {
    std::string method;  // "isolation_forest" or "lof"
    std::vector<double> scores;
    std::vector<bool> flagged;  // score >= threshold
    double threshold = 0.0;
};

/// Average unsuccessful-search path length in a binary search tree of n
/// points: c(n) = 2 H(n-1) - 2 (n-1) / n, with c(0) = c(1) = 0, c(2) = 1.
double average_path_length(std::size_t n) noexcept;

struct IsolationForestConfig {
    std::size_t trees = 100;
    std::size_t subsample = 256;  // capped at the row count
    std::uint64_t seed = 42;
    double threshold = 0.6;
};

struct IsolationNode {
    int feature = -1;  // -1 marks an external node
    double split = 0.0;
    int left = -1;  // x[feature] < split
    int right = -1;
    std::size_t size = 0;  // training points that reached an external node
};

struct IsolationTree {
    std::vector<IsolationNode> nodes;  // nodes[0] is the root
};

/// Ensemble of random isolation trees. Tree t draws its subsample, split
/// features and split points from a stream seeded by (seed, t), so trees are
/// independent of build order.
class IsolationForest {
public:
    /// Throws TooFewRows (fewer than 2 rows), InvalidArgument, NonFiniteFeature.
    static IsolationForest fit(const Matrix& x, const IsolationForestConfig& config);

    /// Edges to the external node plus c(size) at that node.
    double path_length(const IsolationTree& tree, std::span<const double> row) const;
    double mean_path_length(std::span<const double> row) const;

    /// 2^(-E[h(x)] / c(subsample)), in (0, 1).
    double score(std::span<const double> row) const;

    const std::vector<IsolationTree>& trees() const noexcept { return trees_; }
    std::size_t subsample_size() const noexcept { return subsample_; }
    const IsolationForestConfig& config() const noexcept { return config_; }

private:
    IsolationForestConfig config_;
    std::size_t subsample_ = 0;
    std::size_t features_ = 0;
    std::vector<IsolationTree> trees_;
};

/// Fits on x and scores every row of x.
AnomalyReport isolation_forest_scores(const Matrix& x, const IsolationForestConfig& config);

struct LofConfig {
    std::size_t k = 10;
    double threshold = 1.5;
};

/// Local Outlier Factor. The k-neighbourhood holds every other point within
/// the k-distance (ties included). Local reachability density uses
/// max(mean reach-dist, 1e-12) so duplicate points stay finite.
/// Throws KOutOfRange unless 1 <= k and rows >= k + 1.
AnomalyReport lof_scores(const Matrix& x, const LofConfig& config);

nlohmann::json to_json(const AnomalyReport& report);

}  // namespace tel
