#pragma once

#include "hdfl/dataset.hpp"
#include "hdfl/vec.hpp"

namespace hdfl {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;  // node index, points with x[feature] < threshold
    int right = -1; // points with x[feature] >= threshold
    int label = 0;  // -1/+1 at leaves

    bool is_leaf() const { return feature < 0; }
};

/// Fully grown CART-style tree over axis-aligned splits: best Gini gain,
/// thresholds at midpoints of adjacent sorted values, ties broken by lowest
/// feature index then lowest threshold. Growth continues until every leaf
/// is pure, so training accuracy is exactly 1 on consistent data.
struct TreeModel {
    std::vector<TreeNode> nodes; // node 0 is the root
    int input_dim = 0;
    int depth = 0;
};

TreeModel train_decision_tree(const Dataset& data);

/// Leaf label as a real (-1 or +1), so sign(decision_value) = predict.
double decision_value(const TreeModel& model, const Vec& x);
int predict(const TreeModel& model, const Vec& x);

double training_accuracy(const TreeModel& model, const Dataset& data);

} // namespace hdfl
