#pragma once

#include "hdfl/rng.hpp"

namespace hdfl {

enum class InitKind { zeros, gaussian };

/// Shared optimizer settings for logistic regression and the MLP. All
/// arithmetic is 64-bit; training is single-threaded and bit-reproducible
/// given (dataset, config).
struct TrainConfig {
    double learning_rate = 0.1;
    int epochs = 200;
    /// 0 means full batch. Mini-batches are drawn from a per-epoch
    /// deterministic shuffle of the point order.
    int batch_size = 0;
    InitKind init = InitKind::gaussian;
    /// Negative means "model default": 0.1 for the linear model,
    /// sqrt(2 / fan_in) per layer for the MLP.
    double init_scale = -1.0;
    SeedSpec seed;
};

} // namespace hdfl
