#include "hdfl/mlp.hpp"

#include <cmath>
#include <numeric>

#include "hdfl/errors.hpp"

namespace hdfl {

namespace {

double logistic_slope(double y, double f) {
    const double t = -y * f;
    const double s = t > 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
    return -y * s;
}

double softplus(double t) {
    return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void check_model(const MlpModel& model) {
    if (model.layers.empty()) throw data_error("mlp: model has no layers");
    if (model.layers.back().fan_out() != 1)
        throw data_error("mlp: output layer must have exactly one unit");
}

// Forward pass keeping every layer's pre-activation.
struct Forward {
    std::vector<Vec> pre;  // [layer][unit]
    std::vector<Vec> post; // [layer][unit], rectified except for the last layer
};

Forward forward_pass(const MlpModel& model, const Vec& x) {
    require_dim(x, static_cast<std::size_t>(model.input_dim), "mlp input");
    Forward fw;
    fw.pre.reserve(model.layers.size());
    fw.post.reserve(model.layers.size());
    const Vec* in = &x;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const MlpLayer& layer = model.layers[l];
        Vec z(layer.weights.size());
        for (std::size_t r = 0; r < layer.weights.size(); ++r)
            z[r] = dot(layer.weights[r], *in) + layer.bias[r];
        Vec a = z;
        if (l + 1 < model.layers.size())
            for (double& v : a) v = v > 0.0 ? v : 0.0;
        fw.pre.push_back(std::move(z));
        fw.post.push_back(std::move(a));
        in = &fw.post.back();
    }
    return fw;
}

} // namespace

double decision_value(const MlpModel& model, const Vec& x) {
    check_model(model);
    return forward_pass(model, x).pre.back()[0];
}

int predict(const MlpModel& model, const Vec& x) {
    return decision_value(model, x) >= 0.0 ? +1 : -1;
}

MlpModel init_mlp(int input_dim, const std::vector<int>& hidden_sizes, const TrainConfig& cfg) {
    if (input_dim < 1) throw data_error("init_mlp: input_dim must be >= 1");
    for (int h : hidden_sizes)
        if (h < 1) throw data_error("init_mlp: hidden sizes must be positive");

    MlpModel model;
    model.input_dim = input_dim;
    Rng rng = Rng(cfg.seed).substream(0);

    std::vector<int> widths;
    widths.push_back(input_dim);
    widths.insert(widths.end(), hidden_sizes.begin(), hidden_sizes.end());
    widths.push_back(1);

    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        MlpLayer layer;
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        const double scale = cfg.init_scale < 0.0
                                 ? std::sqrt(2.0 / static_cast<double>(fan_in))
                                 : cfg.init_scale;
        layer.weights.assign(static_cast<std::size_t>(fan_out),
                             Vec(static_cast<std::size_t>(fan_in), 0.0));
        layer.bias.assign(static_cast<std::size_t>(fan_out), 0.0);
        if (cfg.init == InitKind::gaussian)
            for (auto& row : layer.weights)
                for (double& v : row) v = scale * rng.next_gaussian();
        model.layers.push_back(std::move(layer));
    }
    return model;
}

double mlp_loss(const MlpModel& model, const std::vector<Vec>& points,
                const std::vector<int>& labels) {
    if (points.empty() || points.size() != labels.size())
        throw data_error("mlp_loss: malformed batch");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        total += softplus(-labels[i] * decision_value(model, points[i]));
    return total / static_cast<double>(points.size());
}

MlpGradients mlp_loss_gradients(const MlpModel& model, const std::vector<Vec>& points,
                                const std::vector<int>& labels) {
    check_model(model);
    if (points.empty() || points.size() != labels.size())
        throw data_error("mlp_loss_gradients: malformed batch");

    MlpGradients grads;
    for (const MlpLayer& layer : model.layers) {
        grads.weights.emplace_back(layer.weights.size(),
                                   Vec(static_cast<std::size_t>(layer.fan_in()), 0.0));
        grads.bias.emplace_back(layer.weights.size(), 0.0);
    }

    const double inv_n = 1.0 / static_cast<double>(points.size());
    const std::size_t last = model.layers.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Forward fw = forward_pass(model, points[i]);
        // delta starts at d loss / d output and walks backward.
        Vec delta{inv_n * logistic_slope(labels[i], fw.pre[last][0])};
        for (std::size_t l = model.layers.size(); l-- > 0;) {
            const MlpLayer& layer = model.layers[l];
            const Vec& in = l == 0 ? points[i] : fw.post[l - 1];
            for (std::size_t r = 0; r < layer.weights.size(); ++r) {
                axpy(delta[r], in, grads.weights[l][r]);
                grads.bias[l][r] += delta[r];
            }
            if (l == 0) break;
            Vec prev(static_cast<std::size_t>(layer.fan_in()), 0.0);
            for (std::size_t r = 0; r < layer.weights.size(); ++r)
                axpy(delta[r], layer.weights[r], prev);
            // Rectifier gate of the layer below; derivative at 0 is 0.
            for (std::size_t k = 0; k < prev.size(); ++k)
                if (!(fw.pre[l - 1][k] > 0.0)) prev[k] = 0.0;
            delta = std::move(prev);
        }
    }
    return grads;
}

MlpModel train_mlp(const Dataset& data, const std::vector<int>& hidden_sizes,
                   const TrainConfig& cfg) {
    if (data.size() == 0) throw data_error("train_mlp: empty dataset");
    bool has_pos = false, has_neg = false;
    for (int y : data.labels) (y > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw data_error("train_mlp: degenerate labels (single class)");
    if (cfg.learning_rate <= 0.0) throw data_error("train_mlp: learning_rate must be > 0");
    if (cfg.epochs < 1) throw data_error("train_mlp: epochs must be >= 1");

    MlpModel model = init_mlp(data.dim(), hidden_sizes, cfg);

    const std::size_t n = data.size();
    const std::size_t batch =
        cfg.batch_size <= 0 ? n : std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n);
    const bool shuffle = batch < n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = Rng(cfg.seed).substream(1);

    std::vector<Vec> batch_points;
    std::vector<int> batch_labels;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (shuffle)
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(order[i], order[shuffle_rng.next_below(i + 1)]);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            batch_points.clear();
            batch_labels.clear();
            for (std::size_t i = start; i < stop; ++i) {
                batch_points.push_back(data.points[order[i]]);
                batch_labels.push_back(data.labels[order[i]]);
            }
            const MlpGradients grads = mlp_loss_gradients(model, batch_points, batch_labels);
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                MlpLayer& layer = model.layers[l];
                for (std::size_t r = 0; r < layer.weights.size(); ++r) {
                    axpy(-cfg.learning_rate, grads.weights[l][r], layer.weights[r]);
                    layer.bias[r] -= cfg.learning_rate * grads.bias[l][r];
                }
            }
        }
    }
    for (const MlpLayer& layer : model.layers) {
        for (const Vec& row : layer.weights)
            if (!all_finite(row)) throw numeric_error("train_mlp: diverged to non-finite parameters");
        if (!all_finite(layer.bias)) throw numeric_error("train_mlp: diverged to non-finite parameters");
    }
    return model;
}

double training_accuracy(const MlpModel& model, const Dataset& data) {
    if (data.size() == 0) throw data_error("training_accuracy: empty dataset");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (predict(model, data.points[i]) == data.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

Vec input_loss_gradient(const MlpModel& model, const Vec& x, int label) {
    const LocalLinearModel local = local_linear_model(model, x);
    const double slope = logistic_slope(label, decision_value(model, x));
    return scaled(local.w_eff, slope);
}

Vec input_loss_gradient(const LinearModel& model, const Vec& x, int label) {
    const double slope = logistic_slope(label, decision_value(model, x));
    return scaled(model.w, slope);
}

namespace {

// Walks the layers accumulating the affine map (rows, offsets) that the
// frozen activation pattern realizes, optionally collecting per-unit maps.
LocalLinearModel compose_pattern(const MlpModel& model, const Vec& x,
                                 std::vector<AffineUnit>* units) {
    check_model(model);
    const Forward fw = forward_pass(model, x);

    std::vector<Vec> rows; // current affine map: row r of layer input as function of x
    Vec offsets;
    bool on_boundary = false;

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const MlpLayer& layer = model.layers[l];
        std::vector<Vec> next_rows(layer.weights.size(),
                                   Vec(static_cast<std::size_t>(model.input_dim), 0.0));
        Vec next_offsets(layer.weights.size(), 0.0);
        for (std::size_t r = 0; r < layer.weights.size(); ++r) {
            if (l == 0) {
                next_rows[r] = layer.weights[r];
            } else {
                for (std::size_t k = 0; k < rows.size(); ++k)
                    if (layer.weights[r][k] != 0.0) axpy(layer.weights[r][k], rows[k], next_rows[r]);
            }
            next_offsets[r] =
                layer.bias[r] + (l == 0 ? 0.0 : dot(layer.weights[r], offsets));
        }
        if (l + 1 < model.layers.size()) {
            for (std::size_t r = 0; r < next_rows.size(); ++r) {
                if (units) units->push_back({next_rows[r], next_offsets[r]});
                if (fw.pre[l][r] == 0.0) on_boundary = true;
                if (!(fw.pre[l][r] > 0.0)) {
                    // Inactive unit (pre <= 0): contributes nothing downstream.
                    std::fill(next_rows[r].begin(), next_rows[r].end(), 0.0);
                    next_offsets[r] = 0.0;
                }
            }
        }
        rows = std::move(next_rows);
        offsets = std::move(next_offsets);
    }

    LocalLinearModel local;
    local.w_eff = rows[0];
    local.b_eff = offsets[0];
    local.anchor = x;
    local.on_boundary = on_boundary;
    return local;
}

} // namespace

LocalLinearModel local_linear_model(const MlpModel& model, const Vec& x) {
    return compose_pattern(model, x, nullptr);
}

LocalLinearModel local_linear_model(const LinearModel& model, const Vec& x) {
    require_dim(x, model.w.size(), "local_linear_model");
    return {model.w, model.b, x, false};
}

std::vector<AffineUnit> hidden_unit_affine_maps(const MlpModel& model, const Vec& x) {
    std::vector<AffineUnit> units;
    compose_pattern(model, x, &units);
    return units;
}

} // namespace hdfl
