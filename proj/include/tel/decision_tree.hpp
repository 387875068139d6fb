#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/matrix.hpp"

namespace tel {

struct TreeConfig {
    std::size_t max_depth = 8;
    std::size_t min_samples_split = 2;
};

/// Internal nodes route x[feature] <= threshold to left. Leaves carry the
/// class distribution of their training samples.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int predicted_class = 0;
    double probability = 1.0;                 // share of predicted_class at the leaf
    std::vector<double> class_probabilities;  // leaves only
    std::size_t samples = 0;
    double gini = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t num_classes = 0;
    std::size_t num_features = 0;
    TreeConfig config;
    std::vector<double> feature_importance;  // total weighted Gini decrease per feature

    std::size_t depth() const;
};

double gini_impurity(std::span<const std::size_t> class_counts) noexcept;

/// Greedy CART on Gini impurity. Candidate thresholds are midpoints between
/// consecutive distinct values; the lowest weighted child impurity wins, ties
/// going to the lowest feature index and then the lowest threshold. A node
/// becomes a leaf when pure, at max_depth, below min_samples_split, or when
/// no feature varies. Labels are class indices >= 0.
/// Throws TooFewRows, LengthMismatch, NonFiniteFeature, InvalidArgument.
DecisionTree train_decision_tree(const Matrix& x, std::span<const int> y, const TreeConfig& config);

const TreeNode& tree_leaf(const DecisionTree& tree, std::span<const double> row);
int tree_predict(const DecisionTree& tree, std::span<const double> row);

/// Probability of class 1 (binary trees); 0 when the class never appeared.
double tree_positive_probability(const DecisionTree& tree, std::span<const double> row);

nlohmann::json to_json(const DecisionTree& tree);
DecisionTree decision_tree_from_json(const nlohmann::json& j);

}  // namespace tel
