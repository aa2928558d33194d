#include "hdfl/linear.hpp"

#include <cmath>

#include "hdfl/errors.hpp"

namespace hdfl {

namespace {

// d/df log(1 + exp(-y f)) = -y * sigmoid(-y f), computed stably.
double logistic_slope(double y, double f) {
    const double t = -y * f;
    const double s = t > 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
    return -y * s;
}

void check_two_classes(const Dataset& data, const char* what) {
    if (data.size() == 0) throw data_error(std::string(what) + ": empty dataset");
    bool has_pos = false, has_neg = false;
    for (int y : data.labels) (y > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw data_error(std::string(what) + ": degenerate labels (single class)");
}

} // namespace

double decision_value(const LinearModel& model, const Vec& x) {
    return dot(model.w, x) + model.b;
}

int predict(const LinearModel& model, const Vec& x) {
    return decision_value(model, x) >= 0.0 ? +1 : -1;
}

LinearModel train_logistic_regression(const Dataset& data, const TrainConfig& cfg) {
    check_two_classes(data, "train_logistic_regression");
    if (cfg.learning_rate <= 0.0) throw data_error("train_logistic_regression: learning_rate must be > 0");
    if (cfg.epochs < 1) throw data_error("train_logistic_regression: epochs must be >= 1");

    const std::size_t n = data.size();
    const std::size_t dim = static_cast<std::size_t>(data.dim());

    LinearModel model;
    model.w.assign(dim, 0.0);
    if (cfg.init == InitKind::gaussian) {
        const double scale = cfg.init_scale < 0.0 ? 0.1 : cfg.init_scale;
        Rng rng = Rng(cfg.seed).substream(0);
        for (double& v : model.w) v = scale * rng.next_gaussian();
    }

    Vec grad_w(dim);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double slope = logistic_slope(data.labels[i], decision_value(model, data.points[i]));
            axpy(slope, data.points[i], grad_w);
            grad_b += slope;
        }
        const double step = cfg.learning_rate / static_cast<double>(n);
        axpy(-step, grad_w, model.w);
        model.b -= step * grad_b;
    }
    if (!all_finite(model.w) || !std::isfinite(model.b))
        throw numeric_error("train_logistic_regression: diverged to non-finite parameters");
    return model;
}

double training_accuracy(const LinearModel& model, const Dataset& data) {
    if (data.size() == 0) throw data_error("training_accuracy: empty dataset");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (predict(model, data.points[i]) == data.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

} // namespace hdfl
