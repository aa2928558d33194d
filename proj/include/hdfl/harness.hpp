#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hdfl/rng.hpp"
#include "hdfl/train_config.hpp"

namespace hdfl {

inline constexpr const char* kCodeVersion = "hdfl 0.1.0";

enum class ExperimentKind {
    margin_collapse,
    noise_ball_sweep,
    fragile_box,
    sphere_scaling,
    lid_contrast,
    transfer_matrix,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// One flat bag of knobs for all experiment kinds; each runner reads the
/// fields it needs. Worker count is deliberately not part of the config:
/// results are bit-identical for any scheduling.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::margin_collapse;
    std::vector<int> dims{10, 50, 100};
    int intrinsic_dim = 2;
    int n_per_class = 100;
    int seeds = 20;
    long trials = 10000;
    double epsilon = 0.5;
    double sigma = 1.0;
    double rho = 0.25;

    // training
    std::vector<int> hidden{16};
    double learning_rate = 0.1;
    int epochs = 300;
    int batch_size = 0;
    std::string init = "gaussian";
    double init_scale = -1.0;

    // manifold template
    std::string manifold = "subspace_gaussians";
    double covariance_scale = 1.0;
    double separation = 6.0;
    double inner_radius = 1.0;
    double outer_radius = 1.3;
    double gap = 1.0;
    double segment_length = 4.0;
    double ambient_noise = 0.0;

    // attacks / probes
    double attack_eps = 0.25;
    double attack_scale = 3.0; // minimal-attack length as a multiple of the margin
    int directions = 100;
    int test_points = 20;
    int eval_points = 20;
    int lid_k = 20;
    int models = 4;

    // stylized fragile-box grid
    std::vector<int> box_k{5, 20, 100};
    std::vector<double> box_d{1.0, 2.0, 3.0};
    std::vector<double> box_sigma{0.5, 1.0, 2.0};
};

/// Per-kind defaults tuned for desk-scale runs.
ExperimentConfig default_config(ExperimentKind kind);

/// Strict JSON parsing: every key must be known, kind must be present;
/// failures name the offending field. The remaining fields start from
/// default_config(kind).
ExperimentConfig config_from_json(const std::string& text);
/// Canonical JSON with every field present and keys sorted; the config
/// hash is FNV-1a over this string.
std::string config_to_canonical_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);
/// key=value override ("last wins"); the value is parsed as JSON when
/// possible, else as a comma list or bare string. Unknown keys throw.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

TrainConfig make_train_config(const ExperimentConfig& cfg, const SeedSpec& seed);

struct ResultRow {
    std::string experiment;
    long n = 0;
    std::string metric;
    double value = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int seeds = 0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::string config_hash;
    std::string code_version;
    std::uint64_t base_seed = 0;
    std::string canonical_config;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                int workers = 1);

/// CSV columns exactly: experiment,N,metric,value,ci_lo,ci_hi,seeds.
std::string result_to_csv(const ExperimentResult& result);
/// JSON sidecar carrying config, hash, code version and base seed.
std::string result_sidecar_json(const ExperimentResult& result);
void write_result_files(const ExperimentResult& result, const std::string& csv_path,
                        const std::string& sidecar_path);
/// Reloads a sidecar and re-hashes the embedded config; throws data_error
/// when the stored hash no longer matches.
ExperimentResult load_validated_sidecar(const std::string& sidecar_path);

/// 1 - (2 Phi(d / sigma) - 1)^k: probability that isotropic N(0, sigma^2)
/// noise escapes the box {|u_i| < d, i <= k} in at least one of the k
/// fragile directions. Phi is evaluated through erf (|error| <= 1e-7).
double fragile_box_analytic(int k, double d, double sigma);

/// Monte Carlo counterpart with per-trial substreams; scheduling-invariant.
double fragile_box_mc(int k, double d, double sigma, long trials, const SeedSpec& seed,
                      int workers = 1, long* misclassified = nullptr);

/// log10 of (L / eps)^n: the Lipschitz cover-count exponent. The count
/// itself is 10^result, astronomically large for image-scale n.
double lipschitz_sample_bound(double lipschitz, double eps, long n);

/// Runs fn(0..count-1) on `workers` threads with static striping. Each
/// index must only touch its own slot; aggregation stays with the caller.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace hdfl
