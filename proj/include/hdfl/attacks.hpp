#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "hdfl/model.hpp"
#include "hdfl/rng.hpp"

namespace hdfl {

struct AttackResult {
    Vec original;
    Vec perturbation;
    bool success = false; // prediction at original + perturbation flipped
    double norm = 0.0;    // Euclidean length of the perturbation
    double norm_inf = 0.0;
    long queries = 0; // decision-value evaluations spent
    std::string kind;
};

/// Closed-form projection onto the hyperplane, scaled past it by
/// `overshoot`: delta = -(1 + overshoot) (w.x + b) / ||w||^2 w. The norm is
/// (1 + overshoot) times the margin.
AttackResult minimal_linear_attack(const LinearModel& model, const Vec& x,
                                   double overshoot = 1e-6);

/// Fast gradient-sign step of size eps on the logistic loss at label y.
/// For a linear model this is x - eps * y * sign(w) componentwise. Throws
/// numeric_error when the gradient vanishes identically.
AttackResult gradient_sign_attack(const Model& model, const Vec& x, int label, double eps);

/// Smallest t > 0 with predict(x + t u) != predict(x) along the unit
/// direction u, located by doubling up to t_max and bisecting to 1e-8
/// relative width. Returns +infinity when no flip occurs by t_max
/// (default 1e3 * max(1, ||x||)). The doubling scan can step over flips
/// thinner than its granularity.
double boundary_distance(const Model& model, const Vec& x, const Vec& direction,
                         double t_max = -1.0);
double boundary_distance(const std::function<int(const Vec&)>& predict_fn, const Vec& x,
                         const Vec& direction, double t_max = -1.0);

struct NoiseBallEstimate {
    double probability = 0.0;
    long trials = 0;
    double ci_lo = 0.0; // 95% Wilson interval
    double ci_hi = 0.0;
    double sigma = 0.0;
};

/// Monte Carlo estimate of P(predict(x + sigma g) != y) for standard normal
/// g. Trial t draws from substream t of the given seed, so the estimate is
/// bit-identical for any worker count.
NoiseBallEstimate noise_ball_misclassification(const Model& model, const Vec& x, int label,
                                               double sigma, long trials, const SeedSpec& seed,
                                               int workers = 1);
NoiseBallEstimate noise_ball_misclassification(const std::function<int(const Vec&)>& predict_fn,
                                               const Vec& x, int label, double sigma, long trials,
                                               const SeedSpec& seed, int workers = 1);

/// True iff the target's prediction flips between x and x + delta.
bool transfer_attack(const AttackResult& result, const Model& target);

/// CSV header point_index,attack_kind,norm,success,transfer_target,transferred.
void write_attacks_csv_header(std::ostream& out);
void write_attack_csv_row(std::ostream& out, std::size_t point_index, const AttackResult& result,
                          const std::string& transfer_target = "",
                          const std::string& transferred = "");

} // namespace hdfl
