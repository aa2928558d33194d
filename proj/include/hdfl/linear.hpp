#pragma once

#include "hdfl/dataset.hpp"
#include "hdfl/train_config.hpp"
#include "hdfl/vec.hpp"

namespace hdfl {

/// Hyperplane discriminant w.x + b = 0.
struct LinearModel {
    Vec w;
    double b = 0.0;
};

double decision_value(const LinearModel& model, const Vec& x);
/// sign(decision_value); sign(0) is +1 by convention.
int predict(const LinearModel& model, const Vec& x);

/// Full-batch gradient descent on the mean logistic loss
/// log(1 + exp(-y (w.x + b))). With Gaussian init and data lying exactly in
/// a subspace, every update stays in span(data), so the component of w
/// perpendicular to the data manifold keeps its initialized value.
LinearModel train_logistic_regression(const Dataset& data, const TrainConfig& cfg);

double training_accuracy(const LinearModel& model, const Dataset& data);

} // namespace hdfl
