#include "hdfl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hdfl/attacks.hpp"
#include "hdfl/dataset.hpp"
#include "hdfl/errors.hpp"
#include "hdfl/lid.hpp"
#include "hdfl/linear.hpp"
#include "hdfl/mlp.hpp"
#include "hdfl/probe.hpp"
#include "hdfl/stats.hpp"

namespace hdfl {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::margin_collapse: return "margin_collapse";
    case ExperimentKind::noise_ball_sweep: return "noise_ball_sweep";
    case ExperimentKind::fragile_box: return "fragile_box";
    case ExperimentKind::sphere_scaling: return "sphere_scaling";
    case ExperimentKind::lid_contrast: return "lid_contrast";
    case ExperimentKind::transfer_matrix: return "transfer_matrix";
    }
    throw data_error("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "margin_collapse") return ExperimentKind::margin_collapse;
    if (name == "noise_ball_sweep") return ExperimentKind::noise_ball_sweep;
    if (name == "fragile_box") return ExperimentKind::fragile_box;
    if (name == "sphere_scaling") return ExperimentKind::sphere_scaling;
    if (name == "lid_contrast") return ExperimentKind::lid_contrast;
    if (name == "transfer_matrix") return ExperimentKind::transfer_matrix;
    throw data_error("unknown experiment kind: " + name);
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    switch (kind) {
    case ExperimentKind::margin_collapse:
        cfg.dims = {10, 50, 100, 500, 1000};
        cfg.seeds = 20;
        cfg.n_per_class = 100;
        cfg.epochs = 300;
        cfg.learning_rate = 0.1;
        cfg.epsilon = 0.5;
        break;
    case ExperimentKind::noise_ball_sweep:
        cfg.dims = {10, 50, 200};
        cfg.seeds = 5;
        cfg.n_per_class = 50;
        cfg.hidden = {16};
        cfg.epochs = 200;
        cfg.learning_rate = 0.05;
        cfg.init_scale = 0.3;
        cfg.sigma = 1.0;
        cfg.trials = 2000;
        cfg.eval_points = 20;
        break;
    case ExperimentKind::fragile_box:
        cfg.dims = {};
        cfg.trials = 1000000;
        break;
    case ExperimentKind::sphere_scaling:
        cfg.dims = {20, 50, 100, 200, 500};
        cfg.seeds = 3;
        cfg.n_per_class = 100;
        cfg.hidden = {32};
        cfg.epochs = 150;
        cfg.learning_rate = 0.2;
        cfg.manifold = "concentric_spheres";
        cfg.directions = 100;
        cfg.test_points = 20;
        break;
    case ExperimentKind::lid_contrast:
        cfg.dims = {50};
        cfg.seeds = 1;
        cfg.n_per_class = 250;
        cfg.hidden = {32};
        cfg.epochs = 300;
        cfg.learning_rate = 0.1;
        cfg.batch_size = 32;
        cfg.manifold = "folded_curve";
        cfg.attack_eps = 0.25;
        cfg.eval_points = 40;
        cfg.lid_k = 20;
        break;
    case ExperimentKind::transfer_matrix:
        cfg.dims = {100};
        cfg.seeds = 1;
        cfg.n_per_class = 100;
        cfg.models = 4;
        cfg.eval_points = 100;
        cfg.attack_scale = 3.0;
        cfg.epochs = 300;
        cfg.learning_rate = 0.1;
        break;
    }
    return cfg;
}

namespace {

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json doc;
    doc["kind"] = to_string(cfg.kind);
    doc["dims"] = cfg.dims;
    doc["intrinsic_dim"] = cfg.intrinsic_dim;
    doc["n_per_class"] = cfg.n_per_class;
    doc["seeds"] = cfg.seeds;
    doc["trials"] = cfg.trials;
    doc["epsilon"] = cfg.epsilon;
    doc["sigma"] = cfg.sigma;
    doc["rho"] = cfg.rho;
    doc["hidden"] = cfg.hidden;
    doc["learning_rate"] = cfg.learning_rate;
    doc["epochs"] = cfg.epochs;
    doc["batch_size"] = cfg.batch_size;
    doc["init"] = cfg.init;
    doc["init_scale"] = cfg.init_scale;
    doc["manifold"] = cfg.manifold;
    doc["covariance_scale"] = cfg.covariance_scale;
    doc["separation"] = cfg.separation;
    doc["inner_radius"] = cfg.inner_radius;
    doc["outer_radius"] = cfg.outer_radius;
    doc["gap"] = cfg.gap;
    doc["segment_length"] = cfg.segment_length;
    doc["ambient_noise"] = cfg.ambient_noise;
    doc["attack_eps"] = cfg.attack_eps;
    doc["attack_scale"] = cfg.attack_scale;
    doc["directions"] = cfg.directions;
    doc["test_points"] = cfg.test_points;
    doc["eval_points"] = cfg.eval_points;
    doc["lid_k"] = cfg.lid_k;
    doc["models"] = cfg.models;
    doc["box_k"] = cfg.box_k;
    doc["box_d"] = cfg.box_d;
    doc["box_sigma"] = cfg.box_sigma;
    return doc;
}

template <typename T>
void read_field(const nlohmann::json& doc, const char* key, T& into) {
    if (!doc.contains(key)) return;
    try {
        into = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw data_error(std::string("config field has wrong type: ") + key);
    }
}

void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& doc) {
    static const char* known[] = {
        "kind", "dims", "intrinsic_dim", "n_per_class", "seeds", "trials", "epsilon",
        "sigma", "rho", "hidden", "learning_rate", "epochs", "batch_size", "init",
        "init_scale", "manifold", "covariance_scale", "separation", "inner_radius",
        "outer_radius", "gap", "segment_length", "ambient_noise", "attack_eps",
        "attack_scale", "directions", "test_points", "eval_points", "lid_k", "models",
        "box_k", "box_d", "box_sigma"};
    for (const auto& item : doc.items()) {
        bool ok = false;
        for (const char* key : known) ok = ok || item.key() == key;
        if (!ok) throw data_error("unknown config field: " + item.key());
    }
    read_field(doc, "dims", cfg.dims);
    read_field(doc, "intrinsic_dim", cfg.intrinsic_dim);
    read_field(doc, "n_per_class", cfg.n_per_class);
    read_field(doc, "seeds", cfg.seeds);
    read_field(doc, "trials", cfg.trials);
    read_field(doc, "epsilon", cfg.epsilon);
    read_field(doc, "sigma", cfg.sigma);
    read_field(doc, "rho", cfg.rho);
    read_field(doc, "hidden", cfg.hidden);
    read_field(doc, "learning_rate", cfg.learning_rate);
    read_field(doc, "epochs", cfg.epochs);
    read_field(doc, "batch_size", cfg.batch_size);
    read_field(doc, "init", cfg.init);
    read_field(doc, "init_scale", cfg.init_scale);
    read_field(doc, "manifold", cfg.manifold);
    read_field(doc, "covariance_scale", cfg.covariance_scale);
    read_field(doc, "separation", cfg.separation);
    read_field(doc, "inner_radius", cfg.inner_radius);
    read_field(doc, "outer_radius", cfg.outer_radius);
    read_field(doc, "gap", cfg.gap);
    read_field(doc, "segment_length", cfg.segment_length);
    read_field(doc, "ambient_noise", cfg.ambient_noise);
    read_field(doc, "attack_eps", cfg.attack_eps);
    read_field(doc, "attack_scale", cfg.attack_scale);
    read_field(doc, "directions", cfg.directions);
    read_field(doc, "test_points", cfg.test_points);
    read_field(doc, "eval_points", cfg.eval_points);
    read_field(doc, "lid_k", cfg.lid_k);
    read_field(doc, "models", cfg.models);
    read_field(doc, "box_k", cfg.box_k);
    read_field(doc, "box_d", cfg.box_d);
    read_field(doc, "box_sigma", cfg.box_sigma);
}

void validate_config(const ExperimentConfig& cfg) {
    for (std::size_t i = 1; i < cfg.dims.size(); ++i)
        if (cfg.dims[i] <= cfg.dims[i - 1])
            throw data_error("config field dims must be strictly increasing");
    if (cfg.trials < 1) throw data_error("config field trials must be >= 1");
    if (cfg.seeds < 1) throw data_error("config field seeds must be >= 1");
    if (cfg.n_per_class < 1) throw data_error("config field n_per_class must be >= 1");
    if (cfg.init != "gaussian" && cfg.init != "zeros")
        throw data_error("config field init must be 'gaussian' or 'zeros'");
}

} // namespace

ExperimentConfig config_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("config JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) throw data_error("config must be a JSON object");
    if (!doc.contains("kind")) throw data_error("config field missing: kind");
    ExperimentConfig cfg = default_config(experiment_kind_from_string(doc.at("kind").get<std::string>()));
    apply_config_json(cfg, doc);
    validate_config(cfg);
    return cfg;
}

std::string config_to_canonical_json(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
    return fnv1a64_hex(config_to_canonical_json(cfg));
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw data_error("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        if (raw.find(',') != std::string::npos) {
            try {
                value = nlohmann::json::parse("[" + raw + "]");
            } catch (const nlohmann::json::exception&) {
                throw data_error("cannot parse override value: " + assignment);
            }
        } else {
            value = raw; // bare string
        }
    }
    nlohmann::json doc;
    doc[key] = value;
    if (key == "kind") {
        cfg.kind = experiment_kind_from_string(value.get<std::string>());
        return;
    }
    apply_config_json(cfg, doc);
    validate_config(cfg);
}

TrainConfig make_train_config(const ExperimentConfig& cfg, const SeedSpec& seed) {
    TrainConfig train;
    train.learning_rate = cfg.learning_rate;
    train.epochs = cfg.epochs;
    train.batch_size = cfg.batch_size;
    train.init = cfg.init == "zeros" ? InitKind::zeros : InitKind::gaussian;
    train.init_scale = cfg.init_scale;
    train.seed = seed;
    return train;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers < 1) workers = 1;
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    std::vector<std::exception_ptr> errors(w);
    for (std::size_t t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += w) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& err : errors)
        if (err) std::rethrow_exception(err);
}

double fragile_box_analytic(int k, double d, double sigma) {
    if (k < 0) throw data_error("fragile_box_analytic: k must be >= 0");
    if (d <= 0.0 || sigma <= 0.0) throw data_error("fragile_box_analytic: d and sigma must be > 0");
    if (k == 0) return 0.0;
    // 2 Phi(d/sigma) - 1 == erf(d / (sigma sqrt(2))): stay probability per direction.
    const double stay = std::erf(d / (sigma * std::sqrt(2.0)));
    return 1.0 - std::pow(stay, static_cast<double>(k));
}

double fragile_box_mc(int k, double d, double sigma, long trials, const SeedSpec& seed,
                      int workers, long* misclassified) {
    if (k < 0) throw data_error("fragile_box_mc: k must be >= 0");
    if (d <= 0.0 || sigma <= 0.0) throw data_error("fragile_box_mc: d and sigma must be > 0");
    if (trials < 1) throw data_error("fragile_box_mc: trials must be >= 1");
    if (workers < 1) workers = 1;

    const Rng root(seed);
    auto run_range = [&](long begin, long end) {
        long hits = 0;
        for (long t = begin; t < end; ++t) {
            Rng trial = root.substream(static_cast<std::uint64_t>(t));
            for (int i = 0; i < k; ++i) {
                if (std::fabs(sigma * trial.next_gaussian()) >= d) {
                    ++hits;
                    break;
                }
            }
        }
        return hits;
    };

    long hits = 0;
    if (workers == 1 || trials < 2 * workers) {
        hits = run_range(0, trials);
    } else {
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
        for (long p : partial) hits += p;
    }
    if (misclassified) *misclassified = hits;
    return static_cast<double>(hits) / static_cast<double>(trials);
}

double lipschitz_sample_bound(double lipschitz, double eps, long n) {
    if (lipschitz <= 0.0 || eps <= 0.0) throw data_error("lipschitz_sample_bound: L and eps must be > 0");
    if (n < 1) throw data_error("lipschitz_sample_bound: n must be >= 1");
    return static_cast<double>(n) * std::log10(lipschitz / eps);
}

namespace {

// Deterministic per-work-item seed: base -> sweep index -> seed index.
std::uint64_t item_seed(std::uint64_t base, std::uint64_t sweep, std::uint64_t seed_idx) {
    return mix_seed(mix_seed(base, sweep), seed_idx);
}

void push_summary(ExperimentResult& out, const std::string& experiment, long n,
                  const std::string& metric, std::vector<double> values) {
    ResultRow row;
    row.experiment = experiment;
    row.n = n;
    row.metric = metric;
    row.seeds = static_cast<int>(values.size());
    row.value = median(values);
    row.ci_lo = quantile(values, 0.25);
    row.ci_hi = quantile(values, 0.75);
    out.rows.push_back(std::move(row));
}

ManifoldSpec manifold_template(const ExperimentConfig& cfg, int n) {
    if (cfg.manifold == "subspace_gaussians")
        return subspace_gaussians_spec(n, cfg.intrinsic_dim, cfg.covariance_scale, cfg.separation);
    if (cfg.manifold == "concentric_spheres")
        return concentric_spheres_spec(n, cfg.inner_radius, cfg.outer_radius);
    if (cfg.manifold == "folded_curve") {
        ManifoldSpec spec = folded_curve_spec(n, cfg.gap, cfg.segment_length, cfg.ambient_noise);
        return spec;
    }
    throw data_error("config field manifold is unknown: " + cfg.manifold);
}

// --- margin_collapse -------------------------------------------------------

ExperimentResult run_margin_collapse(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                     int workers) {
    struct Point {
        double shrink = 0.0;
        double min_margin = 0.0;
        double frac_below = 0.0;
    };
    const std::size_t n_dims = cfg.dims.size();
    const std::size_t per_dim = static_cast<std::size_t>(cfg.seeds);
    std::vector<Point> slots(n_dims * per_dim);

    parallel_for(slots.size(), workers, [&](std::size_t i) {
        const std::size_t di = i / per_dim;
        const std::size_t si = i % per_dim;
        const int n = cfg.dims[di];
        const std::uint64_t seed = item_seed(base_seed, di, si);
        const ManifoldSpec spec = subspace_gaussians_spec(n, std::min(cfg.intrinsic_dim, n),
                                                          cfg.covariance_scale, cfg.separation);
        const Dataset data = generate_subspace_gaussians(spec, cfg.n_per_class, SeedSpec{seed, 0});
        const LinearModel model =
            train_logistic_regression(data, make_train_config(cfg, SeedSpec{seed, 1}));
        const FragilityStats stats = fragility_stats(model, data, cfg.epsilon);
        slots[i] = {stats.shrink_factor.value_or(1.0), stats.min_margin, stats.frac_below_epsilon};
    });

    ExperimentResult out;
    const std::string name = to_string(cfg.kind);
    for (std::size_t di = 0; di < n_dims; ++di) {
        std::vector<double> shrink, min_margin, frac;
        for (std::size_t si = 0; si < per_dim; ++si) {
            const Point& p = slots[di * per_dim + si];
            shrink.push_back(p.shrink);
            min_margin.push_back(p.min_margin);
            frac.push_back(p.frac_below);
        }
        push_summary(out, name, cfg.dims[di], "shrink_factor", std::move(shrink));
        push_summary(out, name, cfg.dims[di], "min_margin", std::move(min_margin));
        push_summary(out, name, cfg.dims[di], "frac_below", std::move(frac));
    }
    return out;
}

// --- noise_ball_sweep ------------------------------------------------------

ExperimentResult run_noise_ball_sweep(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                      int workers) {
    const std::size_t n_dims = cfg.dims.size();
    const std::size_t per_dim = static_cast<std::size_t>(cfg.seeds);
    std::vector<double> slots(n_dims * per_dim, 0.0);

    parallel_for(slots.size(), workers, [&](std::size_t i) {
        const std::size_t di = i / per_dim;
        const std::size_t si = i % per_dim;
        const int n = cfg.dims[di];
        const std::uint64_t seed = item_seed(base_seed, di, si);
        const ManifoldSpec spec = subspace_gaussians_spec(n, std::min(cfg.intrinsic_dim, n),
                                                          cfg.covariance_scale, cfg.separation);
        const Dataset data = generate_subspace_gaussians(spec, cfg.n_per_class, SeedSpec{seed, 0});
        const MlpModel model = train_mlp(data, cfg.hidden, make_train_config(cfg, SeedSpec{seed, 1}));

        const std::size_t count = std::min<std::size_t>(data.size(),
                                                        static_cast<std::size_t>(cfg.eval_points));
        double total = 0.0;
        for (std::size_t p = 0; p < count; ++p) {
            const std::size_t idx = p * data.size() / count;
            total += noise_ball_misclassification(Model{model}, data.points[idx], data.labels[idx],
                                                  cfg.sigma, cfg.trials,
                                                  SeedSpec{mix_seed(seed, 100 + p), 0})
                         .probability;
        }
        slots[i] = total / static_cast<double>(count);
    });

    ExperimentResult out;
    const std::string name = to_string(cfg.kind);
    for (std::size_t di = 0; di < n_dims; ++di) {
        std::vector<double> probs(slots.begin() + static_cast<std::ptrdiff_t>(di * per_dim),
                                  slots.begin() + static_cast<std::ptrdiff_t>((di + 1) * per_dim));
        push_summary(out, name, cfg.dims[di], "mlp_misclassification", std::move(probs));

        // Stylized fragile-box companion at k = floor(rho N).
        const int k = static_cast<int>(std::floor(cfg.rho * cfg.dims[di]));
        const double d = cfg.box_d.empty() ? 1.0 : cfg.box_d[0];
        long hits = 0;
        const double mc = fragile_box_mc(k, d, cfg.sigma, cfg.trials,
                                         SeedSpec{item_seed(base_seed, 1000 + di, 0), 0}, workers,
                                         &hits);
        const Interval ci = wilson_interval(hits, cfg.trials);
        out.rows.push_back({name, cfg.dims[di], "fragile_box_mc", mc, ci.lo, ci.hi, 1});
        const double exact = fragile_box_analytic(k, d, cfg.sigma);
        out.rows.push_back({name, cfg.dims[di], "fragile_box_analytic", exact, exact, exact, 1});
    }
    return out;
}

// --- fragile_box grid ------------------------------------------------------

ExperimentResult run_fragile_box(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                 int workers) {
    ExperimentResult out;
    const std::string name = to_string(cfg.kind);
    std::size_t cell = 0;
    for (int k : cfg.box_k)
        for (double d : cfg.box_d)
            for (double sigma : cfg.box_sigma) {
                long hits = 0;
                const double mc = fragile_box_mc(k, d, sigma, cfg.trials,
                                                 SeedSpec{mix_seed(base_seed, cell), 0}, workers,
                                                 &hits);
                const Interval ci = wilson_interval(hits, cfg.trials);
                const std::string suffix =
                    "[d=" + format_double(d) + ";sigma=" + format_double(sigma) + "]";
                out.rows.push_back({name, k, "mc" + suffix, mc, ci.lo, ci.hi, 1});
                const double exact = fragile_box_analytic(k, d, sigma);
                out.rows.push_back({name, k, "analytic" + suffix, exact, exact, exact, 1});
                ++cell;
            }
    return out;
}

// --- sphere_scaling --------------------------------------------------------

ExperimentResult run_sphere_scaling(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                    int workers) {
    const std::size_t n_dims = cfg.dims.size();
    const std::size_t per_dim = static_cast<std::size_t>(cfg.seeds);
    std::vector<double> slots(n_dims * per_dim, 0.0);

    parallel_for(slots.size(), workers, [&](std::size_t i) {
        const std::size_t di = i / per_dim;
        const std::size_t si = i % per_dim;
        const int n = cfg.dims[di];
        const std::uint64_t seed = item_seed(base_seed, di, si);
        const ManifoldSpec spec = concentric_spheres_spec(n, cfg.inner_radius, cfg.outer_radius);
        const Dataset train = generate_concentric_spheres(spec, cfg.n_per_class, SeedSpec{seed, 0});
        const MlpModel mlp = train_mlp(train, cfg.hidden, make_train_config(cfg, SeedSpec{seed, 1}));
        const Model model{mlp};

        const Dataset test = generate_concentric_spheres(spec, std::max(1, cfg.test_points / 2),
                                                         SeedSpec{seed, 2});
        Rng dir_rng = Rng(SeedSpec{seed, 3});
        std::vector<double> nearest;
        for (std::size_t p = 0; p < test.size(); ++p) {
            double best = std::numeric_limits<double>::infinity();
            Vec dir(test.points[p].size());
            for (int d = 0; d < cfg.directions; ++d) {
                for (double& v : dir) v = dir_rng.next_gaussian();
                best = std::min(best, boundary_distance(model, test.points[p], dir));
            }
            if (std::isfinite(best)) nearest.push_back(best);
        }
        if (nearest.empty()) throw numeric_error("sphere_scaling: no boundary found from any test point");
        slots[i] = mean(nearest);
    });

    ExperimentResult out;
    const std::string name = to_string(cfg.kind);
    std::vector<double> log_n, log_dist;
    for (std::size_t di = 0; di < n_dims; ++di) {
        std::vector<double> dists(slots.begin() + static_cast<std::ptrdiff_t>(di * per_dim),
                                  slots.begin() + static_cast<std::ptrdiff_t>((di + 1) * per_dim));
        const double med = median(dists);
        push_summary(out, name, cfg.dims[di], "nearest_error_distance", std::move(dists));
        log_n.push_back(std::log10(static_cast<double>(cfg.dims[di])));
        log_dist.push_back(std::log10(med));
    }
    if (log_n.size() >= 2) {
        const double slope = fit_slope(log_n, log_dist);
        out.rows.push_back({name, 0, "loglog_slope", slope, slope, slope,
                            static_cast<int>(per_dim)});
    }
    return out;
}

// --- lid_contrast ----------------------------------------------------------

ExperimentResult run_lid_contrast(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                  int workers) {
    struct Point {
        double mean_natural = 0.0;
        double mean_adversarial = 0.0;
        double p = 1.0;
    };
    const std::size_t n_dims = cfg.dims.size();
    const std::size_t per_dim = static_cast<std::size_t>(cfg.seeds);
    std::vector<Point> slots(n_dims * per_dim);

    parallel_for(slots.size(), workers, [&](std::size_t i) {
        const std::size_t di = i / per_dim;
        const std::size_t si = i % per_dim;
        const int n = cfg.dims[di];
        const std::uint64_t seed = item_seed(base_seed, di, si);
        const ManifoldSpec spec = manifold_template(cfg, n);
        const Dataset data = generate_dataset(spec, cfg.n_per_class, SeedSpec{seed, 0});
        const MlpModel mlp = train_mlp(data, cfg.hidden, make_train_config(cfg, SeedSpec{seed, 1}));
        const Model model{mlp};

        const std::size_t count = std::min<std::size_t>(data.size(),
                                                        static_cast<std::size_t>(cfg.eval_points));
        std::vector<Vec> natural, adversarial;
        for (std::size_t p = 0; p < count; ++p) {
            const std::size_t idx = p * data.size() / count;
            natural.push_back(data.points[idx]);
            const AttackResult attack =
                gradient_sign_attack(model, data.points[idx], data.labels[idx], cfg.attack_eps);
            adversarial.push_back(add(attack.original, attack.perturbation));
        }
        const LidContrast contrast = lid_contrast(natural, adversarial, data, cfg.lid_k);
        slots[i] = {contrast.mean_natural, contrast.mean_adversarial, contrast.rank_sum_p};
    });

    ExperimentResult out;
    const std::string name = to_string(cfg.kind);
    for (std::size_t di = 0; di < n_dims; ++di) {
        std::vector<double> nat, adv, pv;
        for (std::size_t si = 0; si < per_dim; ++si) {
            const Point& p = slots[di * per_dim + si];
            nat.push_back(p.mean_natural);
            adv.push_back(p.mean_adversarial);
            pv.push_back(p.p);
        }
        push_summary(out, name, cfg.dims[di], "mean_natural_lid", std::move(nat));
        push_summary(out, name, cfg.dims[di], "mean_adversarial_lid", std::move(adv));
        push_summary(out, name, cfg.dims[di], "rank_sum_p", std::move(pv));
    }
    return out;
}

// --- transfer_matrix -------------------------------------------------------

ExperimentResult run_transfer_matrix(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                     int workers) {
    ExperimentResult out;
    const std::string name = to_string(cfg.kind);
    const int m = cfg.models;
    if (m < 2) throw data_error("transfer_matrix: models must be >= 2");

    for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
        const int n = cfg.dims[di];
        // transferred[i][j] over all seeds; attempts shared per source.
        std::vector<std::vector<long>> transferred(static_cast<std::size_t>(m),
                                                   std::vector<long>(static_cast<std::size_t>(m), 0));
        long attempts = 0;

        for (int s = 0; s < cfg.seeds; ++s) {
            const std::uint64_t seed = item_seed(base_seed, di, static_cast<std::uint64_t>(s));
            const ManifoldSpec spec = subspace_gaussians_spec(n, std::min(cfg.intrinsic_dim, n),
                                                              cfg.covariance_scale, cfg.separation);
            std::vector<Dataset> datasets;
            std::vector<Model> models;
            for (int i = 0; i < m; ++i) {
                const std::uint64_t ms = mix_seed(seed, static_cast<std::uint64_t>(i));
                datasets.push_back(generate_subspace_gaussians(spec, cfg.n_per_class, SeedSpec{ms, 0}));
                models.emplace_back(
                    train_logistic_regression(datasets.back(), make_train_config(cfg, SeedSpec{ms, 1})));
            }

            std::vector<std::vector<AttackResult>> attacks(static_cast<std::size_t>(m));
            const double overshoot = cfg.attack_scale - 1.0;
            parallel_for(static_cast<std::size_t>(m), workers, [&](std::size_t i) {
                const Dataset& data = datasets[i];
                const std::size_t count =
                    std::min<std::size_t>(data.size(), static_cast<std::size_t>(cfg.eval_points));
                for (std::size_t p = 0; p < count; ++p) {
                    const std::size_t idx = p * data.size() / count;
                    attacks[i].push_back(minimal_linear_attack(
                        std::get<LinearModel>(models[i]), data.points[idx], overshoot));
                }
            });

            attempts += static_cast<long>(attacks[0].size());
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (const AttackResult& attack : attacks[static_cast<std::size_t>(i)])
                        if (transfer_attack(attack, models[static_cast<std::size_t>(j)]))
                            ++transferred[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }

        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const long hits = transferred[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                const Interval ci = wilson_interval(hits, attempts);
                out.rows.push_back({name, n,
                                    "transfer_" + std::to_string(i) + "_" + std::to_string(j),
                                    static_cast<double>(hits) / static_cast<double>(attempts),
                                    ci.lo, ci.hi, cfg.seeds});
            }
    }
    return out;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::uint64_t base_seed, int workers) {
    validate_config(cfg);
    ExperimentResult result;
    switch (cfg.kind) {
    case ExperimentKind::margin_collapse:
        result = run_margin_collapse(cfg, base_seed, workers);
        break;
    case ExperimentKind::noise_ball_sweep:
        result = run_noise_ball_sweep(cfg, base_seed, workers);
        break;
    case ExperimentKind::fragile_box:
        result = run_fragile_box(cfg, base_seed, workers);
        break;
    case ExperimentKind::sphere_scaling:
        result = run_sphere_scaling(cfg, base_seed, workers);
        break;
    case ExperimentKind::lid_contrast:
        result = run_lid_contrast(cfg, base_seed, workers);
        break;
    case ExperimentKind::transfer_matrix:
        result = run_transfer_matrix(cfg, base_seed, workers);
        break;
    }
    result.config_hash = config_hash(cfg);
    result.code_version = kCodeVersion;
    result.base_seed = base_seed;
    result.canonical_config = config_to_canonical_json(cfg);
    return result;
}

std::string result_to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "experiment,N,metric,value,ci_lo,ci_hi,seeds\n";
    for (const ResultRow& row : result.rows)
        out << row.experiment << ',' << row.n << ',' << row.metric << ','
            << format_double(row.value) << ',' << format_double(row.ci_lo) << ','
            << format_double(row.ci_hi) << ',' << row.seeds << '\n';
    return out.str();
}

std::string result_sidecar_json(const ExperimentResult& result) {
    nlohmann::json doc;
    doc["config"] = nlohmann::json::parse(result.canonical_config);
    doc["config_hash"] = result.config_hash;
    doc["code_version"] = result.code_version;
    doc["base_seed"] = result.base_seed;
    return doc.dump(2) + "\n";
}

void write_result_files(const ExperimentResult& result, const std::string& csv_path,
                        const std::string& sidecar_path) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw data_error("cannot open for writing: " + csv_path);
    csv << result_to_csv(result);
    std::ofstream side(sidecar_path, std::ios::binary);
    if (!side) throw data_error("cannot open for writing: " + sidecar_path);
    side << result_sidecar_json(result);
}

ExperimentResult load_validated_sidecar(const std::string& sidecar_path) {
    std::ifstream in(sidecar_path, std::ios::binary);
    if (!in) throw data_error("cannot open sidecar file: " + sidecar_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("sidecar JSON parse error: ") + e.what());
    }
    ExperimentResult result;
    try {
        result.canonical_config = doc.at("config").dump();
        result.config_hash = doc.at("config_hash").get<std::string>();
        result.code_version = doc.at("code_version").get<std::string>();
        result.base_seed = doc.at("base_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("sidecar JSON field error: ") + e.what());
    }
    const ExperimentConfig cfg = config_from_json(result.canonical_config);
    if (config_hash(cfg) != result.config_hash)
        throw data_error("sidecar config hash mismatch: file was edited or produced by other code");
    return result;
}

} // namespace hdfl
