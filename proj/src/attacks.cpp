#include "hdfl/attacks.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "hdfl/errors.hpp"
#include "hdfl/stats.hpp"

namespace hdfl {

AttackResult minimal_linear_attack(const LinearModel& model, const Vec& x, double overshoot) {
    if (overshoot <= 0.0) throw data_error("minimal_linear_attack: overshoot must be positive");
    const double len2 = dot(model.w, model.w);
    if (len2 == 0.0) throw numeric_error("minimal_linear_attack: zero weight vector");

    const double value = decision_value(model, x);
    AttackResult result;
    result.kind = "minimal";
    result.original = x;
    result.perturbation = scaled(model.w, -(1.0 + overshoot) * value / len2);
    result.norm = norm(result.perturbation);
    result.norm_inf = norm_inf(result.perturbation);
    result.success = predict(model, add(x, result.perturbation)) != predict(model, x);
    result.queries = 2;
    return result;
}

AttackResult gradient_sign_attack(const Model& model, const Vec& x, int label, double eps) {
    if (eps < 0.0) throw data_error("gradient_sign_attack: eps must be >= 0");

    Vec grad;
    if (const auto* linear = std::get_if<LinearModel>(&model))
        grad = input_loss_gradient(*linear, x, label);
    else if (const auto* mlp = std::get_if<MlpModel>(&model))
        grad = input_loss_gradient(*mlp, x, label);
    else
        throw data_error("gradient_sign_attack: tree models have no usable gradient");

    bool any = false;
    Vec step(grad.size(), 0.0);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (grad[i] > 0.0)
            step[i] = eps;
        else if (grad[i] < 0.0)
            step[i] = -eps;
        if (grad[i] != 0.0) any = true;
    }
    if (!any) throw numeric_error("gradient_sign_attack: gradient is exactly zero");

    AttackResult result;
    result.kind = "fgsm";
    result.original = x;
    result.perturbation = std::move(step);
    result.norm = norm(result.perturbation);
    result.norm_inf = norm_inf(result.perturbation);
    result.success =
        eps > 0.0 && predict(model, add(x, result.perturbation)) != predict(model, x);
    result.queries = 3;
    return result;
}

double boundary_distance(const std::function<int(const Vec&)>& predict_fn, const Vec& x,
                         const Vec& direction, double t_max) {
    const double len = norm(direction);
    if (len == 0.0) throw data_error("boundary_distance: zero direction");
    const Vec unit = scaled(direction, 1.0 / len);
    if (t_max <= 0.0) t_max = 1e3 * std::max(1.0, norm(x));

    const int base = predict_fn(x);
    auto flipped = [&](double t) {
        Vec probe = x;
        axpy(t, unit, probe);
        return predict_fn(probe) != base;
    };

    // Doubling scan for a bracket [lo, hi] with the flip at hi.
    double lo = 0.0;
    double hi = t_max * 0x1.0p-40;
    bool found = false;
    while (hi <= t_max) {
        if (flipped(hi)) {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if (!found) {
        if (hi / 2.0 < t_max && flipped(t_max)) {
            lo = hi / 2.0;
            hi = t_max;
        } else {
            return std::numeric_limits<double>::infinity();
        }
    }
    while (hi - lo > 1e-8 * hi) {
        const double mid = 0.5 * (lo + hi);
        (flipped(mid) ? hi : lo) = mid;
    }
    return hi;
}

double boundary_distance(const Model& model, const Vec& x, const Vec& direction, double t_max) {
    return boundary_distance([&](const Vec& p) { return predict(model, p); }, x, direction, t_max);
}

NoiseBallEstimate noise_ball_misclassification(const std::function<int(const Vec&)>& predict_fn,
                                               const Vec& x, int label, double sigma, long trials,
                                               const SeedSpec& seed, int workers) {
    if (sigma <= 0.0) throw data_error("noise_ball_misclassification: sigma must be positive");
    if (trials < 1) throw data_error("noise_ball_misclassification: trials must be >= 1");
    if (workers < 1) workers = 1;

    const Rng root(seed);
    auto run_range = [&](long begin, long end) {
        long hits = 0;
        Vec probe(x.size());
        for (long t = begin; t < end; ++t) {
            Rng trial = root.substream(static_cast<std::uint64_t>(t));
            for (std::size_t i = 0; i < x.size(); ++i)
                probe[i] = x[i] + sigma * trial.next_gaussian();
            if (predict_fn(probe) != label) ++hits;
        }
        return hits;
    };

    long misclassified = 0;
    if (workers == 1 || trials < 2 * workers) {
        misclassified = run_range(0, trials);
    } else {
        // Integer counts are associative, so per-range sums are exactly
        // scheduling-independent.
        std::vector<long> partial(static_cast<std::size_t>(workers), 0);
        std::vector<std::thread> pool;
        const long chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                const long begin = static_cast<long>(w) * chunk;
                const long end = std::min(trials, begin + chunk);
                if (begin < end) partial[static_cast<std::size_t>(w)] = run_range(begin, end);
            });
        for (std::thread& th : pool) th.join();
        for (long p : partial) misclassified += p;
    }

    NoiseBallEstimate estimate;
    estimate.probability = static_cast<double>(misclassified) / static_cast<double>(trials);
    estimate.trials = trials;
    estimate.sigma = sigma;
    const Interval ci = wilson_interval(misclassified, trials);
    estimate.ci_lo = ci.lo;
    estimate.ci_hi = ci.hi;
    return estimate;
}

NoiseBallEstimate noise_ball_misclassification(const Model& model, const Vec& x, int label,
                                               double sigma, long trials, const SeedSpec& seed,
                                               int workers) {
    return noise_ball_misclassification([&](const Vec& p) { return predict(model, p); }, x, label,
                                        sigma, trials, seed, workers);
}

bool transfer_attack(const AttackResult& result, const Model& target) {
    return predict(target, add(result.original, result.perturbation)) !=
           predict(target, result.original);
}

void write_attacks_csv_header(std::ostream& out) {
    out << "point_index,attack_kind,norm,success,transfer_target,transferred\n";
}

void write_attack_csv_row(std::ostream& out, std::size_t point_index, const AttackResult& result,
                          const std::string& transfer_target, const std::string& transferred) {
    out << point_index << ',' << result.kind << ',' << format_double(result.norm) << ','
        << (result.success ? 1 : 0) << ',' << transfer_target << ',' << transferred << '\n';
}

} // namespace hdfl
