#include <doctest.h>

#include <cmath>

#include "hdfl/errors.hpp"
#include "hdfl/mlp.hpp"

using namespace hdfl;

namespace {

Dataset xor_dataset() {
    Dataset data;
    data.points = {Vec{0.0, 0.0}, Vec{0.0, 1.0}, Vec{1.0, 0.0}, Vec{1.0, 1.0}};
    data.labels = {-1, 1, 1, -1};
    return data;
}

// Central finite differences over every parameter; the independent oracle
// for backprop.
double max_gradient_rel_error(MlpModel model, const std::vector<Vec>& points,
                              const std::vector<int>& labels, double h) {
    const MlpGradients grads = mlp_loss_gradients(model, points, labels);
    double worst = 0.0;
    auto probe = [&](double& param, double analytic) {
        const double keep = param;
        param = keep + h;
        const double up = mlp_loss(model, points, labels);
        param = keep - h;
        const double down = mlp_loss(model, points, labels);
        param = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
        worst = std::max(worst, std::fabs(analytic - numeric) / scale);
    };
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        for (std::size_t r = 0; r < model.layers[l].weights.size(); ++r)
            for (std::size_t c = 0; c < model.layers[l].weights[r].size(); ++c)
                probe(model.layers[l].weights[r][c], grads.weights[l][r][c]);
        for (std::size_t r = 0; r < model.layers[l].bias.size(); ++r)
            probe(model.layers[l].bias[r], grads.bias[l][r]);
    }
    return worst;
}

} // namespace

TEST_CASE("zero final layer outputs 0 everywhere and predicts +1") {
    TrainConfig cfg;
    cfg.init = InitKind::zeros;
    const MlpModel model = init_mlp(3, {4}, cfg);
    CHECK(decision_value(model, Vec{1.0, -2.0, 0.5}) == 0.0);
    CHECK(predict(model, Vec{1.0, -2.0, 0.5}) == +1);
}

TEST_CASE("backprop matches central finite differences") {
    TrainConfig cfg;
    cfg.seed = SeedSpec{303, 0};
    Rng rng(SeedSpec{303, 1});

    SUBCASE("two hidden layers at a random batch") {
        const MlpModel model = init_mlp(5, {7, 3}, cfg);
        std::vector<Vec> points;
        std::vector<int> labels;
        for (int i = 0; i < 6; ++i) {
            Vec x(5);
            for (double& v : x) v = rng.next_gaussian();
            points.push_back(std::move(x));
            labels.push_back(rng.next_uniform() < 0.5 ? -1 : 1);
        }
        CHECK(max_gradient_rel_error(model, points, labels, 1e-5) < 1e-4);
    }
    SUBCASE("no hidden layer") {
        const MlpModel model = init_mlp(4, {}, cfg);
        std::vector<Vec> points{Vec{0.2, -0.1, 0.4, 1.0}, Vec{-1.0, 0.3, 0.0, 0.5}};
        std::vector<int> labels{1, -1};
        CHECK(max_gradient_rel_error(model, points, labels, 1e-5) < 1e-4);
    }
}

TEST_CASE("XOR trains to accuracy 1 with one hidden layer") {
    TrainConfig cfg;
    cfg.seed = SeedSpec{7, 0};
    cfg.learning_rate = 0.5;
    cfg.epochs = 4000;
    const MlpModel model = train_mlp(xor_dataset(), {8}, cfg);
    CHECK(training_accuracy(model, xor_dataset()) == 1.0);
}

TEST_CASE("empty hidden list reproduces logistic regression exactly") {
    const ManifoldSpec spec = subspace_gaussians_spec(6, 2);
    const Dataset data = generate_subspace_gaussians(spec, 40, SeedSpec{71, 0});
    TrainConfig cfg;
    cfg.seed = SeedSpec{71, 1};
    cfg.epochs = 120;
    cfg.init_scale = 0.1;
    cfg.batch_size = 0; // full batch on both sides
    const MlpModel mlp = train_mlp(data, {}, cfg);
    const LinearModel linear = train_logistic_regression(data, cfg);
    REQUIRE(mlp.layers.size() == 1);
    CHECK(mlp.layers[0].bias[0] == linear.b);
    for (std::size_t i = 0; i < linear.w.size(); ++i)
        CHECK(mlp.layers[0].weights[0][i] == linear.w[i]);
}

TEST_CASE("non-positive hidden sizes are rejected") {
    TrainConfig cfg;
    CHECK_THROWS_AS(init_mlp(3, {4, 0}, cfg), data_error);
    CHECK_THROWS_AS(init_mlp(3, {-2}, cfg), data_error);
}

TEST_CASE("mlp training is bit-deterministic, including mini-batch shuffling") {
    const ManifoldSpec spec = subspace_gaussians_spec(8, 2);
    const Dataset data = generate_subspace_gaussians(spec, 30, SeedSpec{91, 0});
    TrainConfig cfg;
    cfg.seed = SeedSpec{91, 1};
    cfg.epochs = 40;
    cfg.batch_size = 16;
    const MlpModel a = train_mlp(data, {6}, cfg);
    const MlpModel b = train_mlp(data, {6}, cfg);
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        for (std::size_t r = 0; r < a.layers[l].weights.size(); ++r)
            for (std::size_t c = 0; c < a.layers[l].weights[r].size(); ++c)
                CHECK(a.layers[l].weights[r][c] == b.layers[l].weights[r][c]);
        for (std::size_t r = 0; r < a.layers[l].bias.size(); ++r)
            CHECK(a.layers[l].bias[r] == b.layers[l].bias[r]);
    }
}

TEST_CASE("local linear model is exact at the anchor and on its polyhedron") {
    TrainConfig cfg;
    cfg.seed = SeedSpec{17, 0};
    const MlpModel model = init_mlp(6, {10, 5}, cfg);
    Rng rng(SeedSpec{17, 1});

    for (int trial = 0; trial < 25; ++trial) {
        Vec x(6);
        for (double& v : x) v = rng.next_gaussian();
        const LocalLinearModel local = local_linear_model(model, x);
        CHECK(std::fabs(decision_value(model, x) - (dot(local.w_eff, x) + local.b_eff)) < 1e-9);

        // A tiny step staying inside the same activation pattern.
        Vec probe = x;
        for (double& v : probe) v += 1e-6 * rng.next_gaussian();
        bool same_pattern = true;
        const auto units_x = hidden_unit_affine_maps(model, x);
        const auto units_p = hidden_unit_affine_maps(model, probe);
        for (std::size_t u = 0; u < units_x.size(); ++u) {
            const double zx = dot(units_x[u].normal, x) + units_x[u].offset;
            const double zp = dot(units_p[u].normal, probe) + units_p[u].offset;
            if ((zx > 0.0) != (zp > 0.0)) same_pattern = false;
        }
        if (same_pattern)
            CHECK(std::fabs(decision_value(model, probe) - (dot(local.w_eff, probe) + local.b_eff)) <
                  1e-9);
    }
}

TEST_CASE("fully active pattern composes to the product of weight matrices") {
    // Weights and inputs all positive, so every unit stays active.
    MlpModel model;
    model.input_dim = 2;
    MlpLayer l0;
    l0.weights = {Vec{1.0, 2.0}, Vec{0.5, 1.0}};
    l0.bias = {0.5, 1.0};
    MlpLayer l1;
    l1.weights = {Vec{1.0, 3.0}};
    l1.bias = {0.25};
    model.layers = {l0, l1};

    const Vec x{1.0, 1.0};
    const LocalLinearModel local = local_linear_model(model, x);
    // w_eff = W1 * W0 = [1*1 + 3*0.5, 1*2 + 3*1] = [2.5, 5]
    CHECK(local.w_eff[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(local.w_eff[1] == doctest::Approx(5.0).epsilon(1e-12));
    // b_eff = W1 * b0 + b1 = 0.5 + 3 + 0.25
    CHECK(local.b_eff == doctest::Approx(3.75).epsilon(1e-12));
    CHECK_FALSE(local.on_boundary);
}

TEST_CASE("exact zero pre-activation sets the boundary flag and counts as inactive") {
    MlpModel model;
    model.input_dim = 1;
    MlpLayer l0;
    l0.weights = {Vec{1.0}};
    l0.bias = {0.0};
    MlpLayer l1;
    l1.weights = {Vec{2.0}};
    l1.bias = {0.0};
    model.layers = {l0, l1};

    const LocalLinearModel local = local_linear_model(model, Vec{0.0});
    CHECK(local.on_boundary);
    CHECK(local.w_eff[0] == 0.0); // unit treated as inactive
}

TEST_CASE("piecewise linearity along in-pattern segments") {
    TrainConfig cfg;
    cfg.seed = SeedSpec{23, 0};
    const MlpModel model = init_mlp(4, {12}, cfg);
    Rng rng(SeedSpec{23, 1});
    Vec x(4);
    for (double& v : x) v = rng.next_gaussian();
    const LocalLinearModel local = local_linear_model(model, x);

    // Points with the same pattern interpolate exactly.
    Vec y = x;
    for (double& v : y) v += 1e-4 * rng.next_gaussian();
    const LocalLinearModel local_y = local_linear_model(model, y);
    bool same = true;
    for (std::size_t i = 0; i < local.w_eff.size(); ++i)
        if (local.w_eff[i] != local_y.w_eff[i]) same = false;
    if (same) {
        for (double alpha : {0.25, 0.5, 0.75}) {
            Vec mid(4);
            for (std::size_t i = 0; i < mid.size(); ++i)
                mid[i] = alpha * x[i] + (1.0 - alpha) * y[i];
            const double direct = decision_value(model, mid);
            const double blended =
                alpha * decision_value(model, x) + (1.0 - alpha) * decision_value(model, y);
            CHECK(std::fabs(direct - blended) < 1e-8);
        }
    }
}
