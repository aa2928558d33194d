#include "hdfl/tree.hpp"

#include <algorithm>
#include <cmath>

#include "hdfl/errors.hpp"

namespace hdfl {

namespace {

double gini(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = -1.0;
};

Split best_split(const Dataset& data, const std::vector<std::size_t>& idx) {
    const int dim = data.dim();
    const std::size_t n = idx.size();
    std::size_t pos_total = 0;
    for (std::size_t i : idx) pos_total += data.labels[i] > 0;
    const double parent = gini(pos_total, n);

    Split best;
    std::vector<std::pair<double, int>> column(n); // (value, label)
    for (int f = 0; f < dim; ++f) {
        for (std::size_t i = 0; i < n; ++i)
            column[i] = {data.points[idx[i]][static_cast<std::size_t>(f)], data.labels[idx[i]]};
        std::sort(column.begin(), column.end());

        std::size_t left_n = 0, left_pos = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_n += 1;
            left_pos += column[i].second > 0;
            const double lo = column[i].first;
            const double hi = column[i + 1].first;
            if (!(lo < hi)) continue;
            const double t = 0.5 * (lo + hi);
            if (!(lo < t && t <= hi)) continue; // rounding collapsed the midpoint
            const std::size_t right_n = n - left_n;
            const std::size_t right_pos = pos_total - left_pos;
            const double child =
                (static_cast<double>(left_n) * gini(left_pos, left_n) +
                 static_cast<double>(right_n) * gini(right_pos, right_n)) /
                static_cast<double>(n);
            const double gain = parent - child;
            if (!best.found || gain > best.gain) {
                best = {true, f, t, gain};
            }
        }
    }
    return best;
}

} // namespace

TreeModel train_decision_tree(const Dataset& data) {
    if (data.size() == 0) throw data_error("train_decision_tree: empty dataset");

    TreeModel model;
    model.input_dim = data.dim();

    struct Work {
        std::vector<std::size_t> idx;
        int node;
        int depth;
    };

    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    model.nodes.emplace_back();
    std::vector<Work> stack;
    stack.push_back({std::move(all), 0, 0});

    while (!stack.empty()) {
        Work work = std::move(stack.back());
        stack.pop_back();
        model.depth = std::max(model.depth, work.depth);

        std::size_t pos = 0;
        for (std::size_t i : work.idx) pos += data.labels[i] > 0;
        if (pos == 0 || pos == work.idx.size()) {
            model.nodes[static_cast<std::size_t>(work.node)].label = pos == 0 ? -1 : +1;
            continue;
        }

        const Split split = best_split(data, work.idx);
        if (!split.found)
            throw data_error(
                "train_decision_tree: contradictory duplicate points (impure node cannot split)");

        std::vector<std::size_t> left, right;
        for (std::size_t i : work.idx) {
            if (data.points[i][static_cast<std::size_t>(split.feature)] < split.threshold)
                left.push_back(i);
            else
                right.push_back(i);
        }

        const int left_node = static_cast<int>(model.nodes.size());
        model.nodes.emplace_back();
        const int right_node = static_cast<int>(model.nodes.size());
        model.nodes.emplace_back();

        TreeNode& node = model.nodes[static_cast<std::size_t>(work.node)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left_node;
        node.right = right_node;

        stack.push_back({std::move(left), left_node, work.depth + 1});
        stack.push_back({std::move(right), right_node, work.depth + 1});
    }
    return model;
}

double decision_value(const TreeModel& model, const Vec& x) {
    if (model.nodes.empty()) throw data_error("tree: empty model");
    require_dim(x, static_cast<std::size_t>(model.input_dim), "tree input");
    int at = 0;
    while (!model.nodes[static_cast<std::size_t>(at)].is_leaf()) {
        const TreeNode& node = model.nodes[static_cast<std::size_t>(at)];
        at = x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
    }
    return static_cast<double>(model.nodes[static_cast<std::size_t>(at)].label);
}

int predict(const TreeModel& model, const Vec& x) {
    return decision_value(model, x) >= 0.0 ? +1 : -1;
}

double training_accuracy(const TreeModel& model, const Dataset& data) {
    if (data.size() == 0) throw data_error("training_accuracy: empty dataset");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (predict(model, data.points[i]) == data.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

} // namespace hdfl
