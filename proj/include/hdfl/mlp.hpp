#pragma once

#include "hdfl/dataset.hpp"
#include "hdfl/linear.hpp"
#include "hdfl/train_config.hpp"
#include "hdfl/vec.hpp"

namespace hdfl {

struct MlpLayer {
    /// weights[r] is the incoming row of output unit r.
    std::vector<Vec> weights;
    Vec bias;

    int fan_in() const { return weights.empty() ? 0 : static_cast<int>(weights[0].size()); }
    int fan_out() const { return static_cast<int>(weights.size()); }
};

/// Fully connected scalar-output network with rectifier hidden layers. The
/// output layer is affine (no activation); prediction is the sign of the
/// output. An empty hidden list reduces the architecture to a linear model.
struct MlpModel {
    int input_dim = 0;
    std::vector<MlpLayer> layers;
};

double decision_value(const MlpModel& model, const Vec& x);
int predict(const MlpModel& model, const Vec& x);

/// Fresh parameters per cfg.init: zeros, or row-wise Gaussian weights with
/// zero biases. A negative cfg.init_scale selects sqrt(2 / fan_in) per layer.
MlpModel init_mlp(int input_dim, const std::vector<int>& hidden_sizes, const TrainConfig& cfg);

/// Mini-batch SGD on the mean logistic loss of the scalar output.
/// batch_size 0 trains full-batch with no shuffling, in which case an empty
/// hidden list reproduces train_logistic_regression update-for-update.
MlpModel train_mlp(const Dataset& data, const std::vector<int>& hidden_sizes,
                   const TrainConfig& cfg);

double training_accuracy(const MlpModel& model, const Dataset& data);

/// Mean logistic loss over a batch; the gradient structures mirror the
/// layer layout. Backprop here is the implementation the finite-difference
/// oracle in the test suite checks.
double mlp_loss(const MlpModel& model, const std::vector<Vec>& points,
                const std::vector<int>& labels);

struct MlpGradients {
    std::vector<std::vector<Vec>> weights; // [layer][row][col]
    std::vector<Vec> bias;                 // [layer][row]
};

MlpGradients mlp_loss_gradients(const MlpModel& model, const std::vector<Vec>& points,
                                const std::vector<int>& labels);

/// Gradient of the logistic loss with respect to the input point.
Vec input_loss_gradient(const MlpModel& model, const Vec& x, int label);
Vec input_loss_gradient(const LinearModel& model, const Vec& x, int label);

/// The exact affine map the network realizes on the activation polyhedron
/// containing the anchor: decision_value(model, x') = w_eff.x' + b_eff for
/// every x' sharing the anchor's activation pattern.
struct LocalLinearModel {
    Vec w_eff;
    double b_eff = 0.0;
    Vec anchor;
    /// True when some hidden pre-activation was exactly 0 at the anchor; the
    /// pattern is then resolved by treating that unit as inactive.
    bool on_boundary = false;
};

LocalLinearModel local_linear_model(const MlpModel& model, const Vec& x);
LocalLinearModel local_linear_model(const LinearModel& model, const Vec& x);

/// One hidden unit's pre-activation as a locally affine function
/// normal.x' + offset, with earlier layers frozen to the anchor's pattern.
struct AffineUnit {
    Vec normal;
    double offset = 0.0;
};

/// Affine maps of every hidden unit at the anchor's activation pattern, in
/// layer-major order, followed by nothing for the output layer (the output
/// map is what local_linear_model returns).
std::vector<AffineUnit> hidden_unit_affine_maps(const MlpModel& model, const Vec& x);

} // namespace hdfl
