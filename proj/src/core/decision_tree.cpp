#include "tel/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "tel/error.hpp"
#include "tel/logistic.hpp"

namespace tel {

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

class Builder {
public:
    Builder(const Matrix& x, std::span<const int> y, std::size_t classes, const TreeConfig& config, DecisionTree& tree)
        : x_(x), y_(y), classes_(classes), config_(config), tree_(tree) {}

    int build(std::vector<std::size_t> rows, std::size_t depth) {
        std::vector<std::size_t> counts(classes_, 0);
        for (std::size_t r : rows) ++counts[static_cast<std::size_t>(y_[r])];
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        {
            TreeNode& node = tree_.nodes.back();
            node.samples = rows.size();
            node.gini = gini_impurity(counts);
        }
        const double node_gini = tree_.nodes[static_cast<std::size_t>(id)].gini;

        std::optional<Split> split;
        if (node_gini > 0.0 && depth < config_.max_depth && rows.size() >= config_.min_samples_split) {
            split = best_split(rows);
        }
        if (!split) {
            make_leaf(tree_.nodes[static_cast<std::size_t>(id)], counts);
            return id;
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (std::size_t r : rows) {
            (x_(r, static_cast<std::size_t>(split->feature)) <= split->threshold ? left : right).push_back(r);
        }
        const double n_total = static_cast<double>(y_.size());
        tree_.feature_importance[static_cast<std::size_t>(split->feature)] +=
            (static_cast<double>(rows.size()) * node_gini - split->weighted_gini * static_cast<double>(rows.size())) /
            n_total;

        const int left_id = build(std::move(left), depth + 1);
        const int right_id = build(std::move(right), depth + 1);
        TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = split->feature;
        node.threshold = split->threshold;
        node.left = left_id;
        node.right = right_id;
        // Internal nodes also record their majority class for inspection.
        node.predicted_class = majority(counts);
        node.probability = static_cast<double>(counts[static_cast<std::size_t>(node.predicted_class)]) /
                           static_cast<double>(rows.size());
        return id;
    }

private:
    static int majority(const std::vector<std::size_t>& counts) {
        return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }

    void make_leaf(TreeNode& node, const std::vector<std::size_t>& counts) const {
        const double n = static_cast<double>(node.samples);
        node.class_probabilities.assign(classes_, 0.0);
        for (std::size_t c = 0; c < classes_; ++c) {
            node.class_probabilities[c] = n > 0 ? static_cast<double>(counts[c]) / n : 0.0;
        }
        node.predicted_class = majority(counts);
        node.probability = node.class_probabilities[static_cast<std::size_t>(node.predicted_class)];
    }

    std::optional<Split> best_split(const std::vector<std::size_t>& rows) const {
        std::optional<Split> best;
        std::vector<std::size_t> order(rows);
        const double n = static_cast<double>(rows.size());
        for (std::size_t f = 0; f < x_.cols(); ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = x_(a, f);
                const double vb = x_(b, f);
                return va < vb || (va == vb && a < b);
            });
            std::vector<std::size_t> left(classes_, 0);
            std::vector<std::size_t> right(classes_, 0);
            for (std::size_t r : order) ++right[static_cast<std::size_t>(y_[r])];
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const auto label = static_cast<std::size_t>(y_[order[i]]);
                ++left[label];
                --right[label];
                const double here = x_(order[i], f);
                const double next = x_(order[i + 1], f);
                if (here == next) continue;
                const double nl = static_cast<double>(i + 1);
                const double weighted = (nl * gini_impurity(left) + (n - nl) * gini_impurity(right)) / n;
                // Strict < keeps the first candidate: lowest feature, then lowest threshold.
                if (!best || weighted < best->weighted_gini) {
                    best = Split{static_cast<int>(f), here + (next - here) / 2.0, weighted};
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    std::span<const int> y_;
    std::size_t classes_;
    const TreeConfig& config_;
    DecisionTree& tree_;
};

std::size_t depth_of(const DecisionTree& tree, int id) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    if (node.is_leaf()) return 0;
    return 1 + std::max(depth_of(tree, node.left), depth_of(tree, node.right));
}

}  // namespace

double gini_impurity(std::span<const std::size_t> class_counts) noexcept {
    const double n = static_cast<double>(std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0}));
    if (n == 0.0) return 0.0;
    double sum_sq = 0.0;
    for (std::size_t c : class_counts) {
        const double p = static_cast<double>(c) / n;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

std::size_t DecisionTree::depth() const { return nodes.empty() ? 0 : depth_of(*this, 0); }

DecisionTree train_decision_tree(const Matrix& x, std::span<const int> y, const TreeConfig& config) {
    if (x.rows() < 1) throw Error(ErrorCode::TooFewRows, "decision tree needs at least 1 row");
    if (y.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "labels and rows differ in length");
    check_finite(x);
    int max_label = 0;
    for (int v : y) {
        if (v < 0) throw Error(ErrorCode::InvalidArgument, "class labels must be >= 0");
        max_label = std::max(max_label, v);
    }
    DecisionTree tree;
    tree.config = config;
    tree.num_classes = static_cast<std::size_t>(max_label) + 1;
    tree.num_features = x.cols();
    tree.feature_importance.assign(x.cols(), 0.0);
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Builder(x, y, tree.num_classes, config, tree).build(std::move(rows), 0);
    return tree;
}

const TreeNode& tree_leaf(const DecisionTree& tree, std::span<const double> row) {
    if (row.size() != tree.num_features) throw Error(ErrorCode::LengthMismatch, "row width differs from tree");
    const TreeNode* node = &tree.nodes.at(0);
    while (!node->is_leaf()) {
        const int next = row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right;
        node = &tree.nodes.at(static_cast<std::size_t>(next));
    }
    return *node;
}

int tree_predict(const DecisionTree& tree, std::span<const double> row) { return tree_leaf(tree, row).predicted_class; }

double tree_positive_probability(const DecisionTree& tree, std::span<const double> row) {
    const TreeNode& leaf = tree_leaf(tree, row);
    return leaf.class_probabilities.size() > 1 ? leaf.class_probabilities[1] : 0.0;
}

nlohmann::json to_json(const DecisionTree& tree) {
    using nlohmann::json;
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        json node{{"samples", n.samples}, {"gini", n.gini}, {"class", n.predicted_class}, {"probability", n.probability}};
        if (n.is_leaf()) {
            node["class_probabilities"] = n.class_probabilities;
        } else {
            node["feature"] = n.feature;
            node["threshold"] = n.threshold;
            node["left"] = n.left;
            node["right"] = n.right;
        }
        nodes.push_back(std::move(node));
    }
    return json{{"kind", "tree"},
                {"nodes", std::move(nodes)},
                {"num_classes", tree.num_classes},
                {"num_features", tree.num_features},
                {"feature_importance", tree.feature_importance},
                {"config", {{"max_depth", tree.config.max_depth}, {"min_samples_split", tree.config.min_samples_split}}}};
}

DecisionTree decision_tree_from_json(const nlohmann::json& j) {
    try {
        DecisionTree tree;
        tree.num_classes = j.at("num_classes").get<std::size_t>();
        tree.num_features = j.at("num_features").get<std::size_t>();
        tree.feature_importance = j.value("feature_importance", std::vector<double>(tree.num_features, 0.0));
        tree.config.max_depth = j.at("config").at("max_depth").get<std::size_t>();
        tree.config.min_samples_split = j.at("config").at("min_samples_split").get<std::size_t>();
        for (const auto& n : j.at("nodes")) {
            TreeNode node;
            node.samples = n.at("samples").get<std::size_t>();
            node.gini = n.at("gini").get<double>();
            node.predicted_class = n.at("class").get<int>();
            node.probability = n.at("probability").get<double>();
            if (n.contains("feature")) {
                node.feature = n.at("feature").get<int>();
                node.threshold = n.at("threshold").get<double>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
            } else {
                node.class_probabilities = n.at("class_probabilities").get<std::vector<double>>();
            }
            tree.nodes.push_back(std::move(node));
        }
        const auto count = static_cast<int>(tree.nodes.size());
        if (count == 0) throw Error(ErrorCode::Parse, "tree has no nodes");
        for (int i = 0; i < count; ++i) {
            const TreeNode& n = tree.nodes[static_cast<std::size_t>(i)];
            if (!n.is_leaf() && (n.left <= i || n.right <= i || n.left >= count || n.right >= count ||
                                 static_cast<std::size_t>(n.feature) >= tree.num_features)) {
                throw Error(ErrorCode::Parse, "tree node children must follow their parent");
            }
        }
        return tree;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed tree: ") + e.what());
    }
}

}  // namespace tel
