#include "hdfl/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdfl/attacks.hpp"
#include "hdfl/dataset.hpp"
#include "hdfl/errors.hpp"
#include "hdfl/harness.hpp"
#include "hdfl/lid.hpp"
#include "hdfl/model.hpp"
#include "hdfl/probe.hpp"
#include "hdfl/stats.hpp"
#include "hdfl/svg.hpp"

namespace hdfl {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

std::uint64_t require_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("HDFL_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw usage_error("HDFL_SEED is not a valid 64-bit seed");
        }
    }
    throw usage_error("a seed is required: pass --seed or set HDFL_SEED");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TrainConfig train_config_from_flags(double lr, int epochs, int batch, const std::string& init,
                                    double init_scale, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.epochs = epochs;
    cfg.batch_size = batch;
    if (init == "zeros")
        cfg.init = InitKind::zeros;
    else if (init == "gaussian")
        cfg.init = InitKind::gaussian;
    else
        throw usage_error("--init must be zeros or gaussian");
    cfg.init_scale = init_scale;
    cfg.seed = SeedSpec{seed, 0};
    return cfg;
}

std::vector<int> parse_hidden(const std::string& text) {
    std::vector<int> sizes;
    if (text.empty()) return sizes;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        try {
            sizes.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw usage_error("--hidden must be a comma list of integers");
        }
    }
    return sizes;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"hdfl: geometry of classifier fragility in high dimensions"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    std::string gen_kind;
    int gen_n = 100, gen_ambient = 50, gen_m = 2;
    double gen_scale = 1.0, gen_separation = 6.0;
    double gen_r1 = 1.0, gen_r2 = 1.3;
    double gen_gap = 1.0, gen_segment = 4.0, gen_spread = 0.0, gen_noise = 0.0;
    std::optional<std::uint64_t> gen_seed;
    std::string gen_out = "dataset.json";
    gen->add_option("--kind", gen_kind, "subspace_gaussians | concentric_spheres | folded_curve")
        ->required();
    gen->add_option("--n", gen_n, "points per class")->required();
    gen->add_option("--ambient", gen_ambient, "ambient dimension N");
    gen->add_option("--m", gen_m, "intrinsic dimension M (subspace_gaussians)");
    gen->add_option("--scale", gen_scale, "covariance scale");
    gen->add_option("--separation", gen_separation, "class separation in sigmas");
    gen->add_option("--r1", gen_r1, "inner sphere radius");
    gen->add_option("--r2", gen_r2, "outer sphere radius");
    gen->add_option("--gap", gen_gap, "hairpin fold gap");
    gen->add_option("--segment-length", gen_segment, "hairpin arm length");
    gen->add_option("--spread-angle", gen_spread, "hairpin opening half-angle (radians)");
    gen->add_option("--noise", gen_noise, "ambient noise amplitude (E||eta||)");
    gen->add_option("--seed", gen_seed, "base seed (or HDFL_SEED)");
    gen->add_option("--out", gen_out, "output dataset path");

    // ---- train ----
    auto* train = app.add_subcommand("train", "train a classifier on a dataset");
    std::string train_model, train_data, train_out = "model.json", train_hidden;
    double train_lr = 0.1, train_init_scale = -1.0;
    int train_epochs = 300, train_batch = 0;
    std::string train_init = "gaussian";
    std::optional<std::uint64_t> train_seed;
    train->add_option("--model", train_model, "linear | mlp | tree")->required();
    train->add_option("--data", train_data, "dataset path")->required();
    train->add_option("--hidden", train_hidden, "mlp hidden sizes, e.g. 16,8");
    train->add_option("--lr", train_lr, "learning rate");
    train->add_option("--epochs", train_epochs, "training epochs");
    train->add_option("--batch", train_batch, "mini-batch size (0 = full batch)");
    train->add_option("--init", train_init, "zeros | gaussian");
    train->add_option("--init-scale", train_init_scale, "gaussian init scale (<0 = default)");
    train->add_option("--seed", train_seed, "base seed (or HDFL_SEED)");
    train->add_option("--out", train_out, "output model path");

    // ---- probe ----
    auto* probe = app.add_subcommand("probe", "margins, complexity and weight decomposition");
    std::string probe_model, probe_data, probe_margins, probe_out;
    bool probe_complexity = false, probe_decomp = false, probe_fragility = false;
    int probe_anchor = 0;
    std::string probe_radius = "auto";
    double probe_rho = 0.25, probe_eps = 0.5;
    probe->add_option("--model", probe_model, "model path")->required();
    probe->add_option("--data", probe_data, "dataset path");
    probe->add_flag("--complexity", probe_complexity, "local complexity report at the anchor");
    probe->add_option("--anchor-index", probe_anchor, "dataset index of the anchor point");
    probe->add_option("--radius", probe_radius, "hyperplane radius, or 'auto' (median distance)");
    probe->add_option("--rho", probe_rho, "locally-complex threshold on rank/N");
    probe->add_flag("--decomp", probe_decomp, "off-manifold weight decomposition (linear model)");
    probe->add_flag("--fragility", probe_fragility, "margin statistics (linear model)");
    probe->add_option("--epsilon", probe_eps, "fragility threshold");
    probe->add_option("--margins", probe_margins, "write per-point margins CSV here");
    probe->add_option("--out", probe_out, "report JSON path (default stdout)");

    // ---- attack ----
    auto* attack = app.add_subcommand("attack", "adversarial perturbations over a dataset");
    std::string attack_model, attack_data, attack_kind = "minimal", attack_target, attack_out = "attacks.csv";
    double attack_eps = 0.25, attack_overshoot = 1e-6;
    attack->add_option("--model", attack_model, "model path")->required();
    attack->add_option("--data", attack_data, "dataset path")->required();
    attack->add_option("--kind", attack_kind, "minimal | fgsm");
    attack->add_option("--eps", attack_eps, "fgsm step size");
    attack->add_option("--overshoot", attack_overshoot, "minimal-attack overshoot");
    attack->add_option("--transfer-target", attack_target, "second model to test transfer against");
    attack->add_option("--out", attack_out, "output CSV path");

    // ---- lid ----
    auto* lid = app.add_subcommand("lid", "intrinsic dimensionality estimates");
    std::string lid_data, lid_estimator = "mle", lid_out = "lid.csv";
    int lid_k = 20;
    lid->add_option("--data", lid_data, "dataset path")->required();
    lid->add_option("--estimator", lid_estimator, "mle | twonn");
    lid->add_option("--k", lid_k, "neighbor count for mle");
    lid->add_option("--out", lid_out, "output CSV path");

    // ---- experiment ----
    auto* experiment = app.add_subcommand("experiment", "run a configured sweep");
    std::string exp_config, exp_out = "results.csv", exp_sidecar;
    std::vector<std::string> exp_sets;
    std::optional<std::uint64_t> exp_seed;
    int exp_workers = 1;
    experiment->add_option("--config", exp_config, "experiment config JSON")->required();
    experiment->add_option("--seed", exp_seed, "base seed (or HDFL_SEED)");
    experiment->add_option("--out", exp_out, "result CSV path");
    experiment->add_option("--sidecar", exp_sidecar, "provenance JSON path (default <out>.json)");
    experiment->add_option("--set", exp_sets, "config override key=value (last wins)");
    experiment->add_option("--workers", exp_workers, "worker threads");

    // ---- plot ----
    auto* plot = app.add_subcommand("plot", "render an experiment CSV as SVG");
    std::string plot_in, plot_out = "plot.svg";
    std::vector<std::string> plot_metrics;
    bool plot_loglog = false, plot_logx = false, plot_logy = false;
    plot->add_option("--input", plot_in, "experiment CSV path")->required();
    plot->add_option("--out", plot_out, "output SVG path");
    plot->add_option("--metric", plot_metrics, "metric(s) to plot (default all)");
    plot->add_flag("--loglog", plot_loglog, "log10 axes");
    plot->add_flag("--logx", plot_logx, "log10 x axis");
    plot->add_flag("--logy", plot_logy, "log10 y axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (gen->parsed()) {
        const std::uint64_t seed = require_seed(gen_seed);
        ManifoldSpec spec;
        const ManifoldKind kind = manifold_kind_from_string(gen_kind);
        switch (kind) {
        case ManifoldKind::subspace_gaussians:
            spec = subspace_gaussians_spec(gen_ambient, gen_m, gen_scale, gen_separation);
            break;
        case ManifoldKind::concentric_spheres:
            spec = concentric_spheres_spec(gen_ambient, gen_r1, gen_r2);
            break;
        case ManifoldKind::folded_curve:
            spec = folded_curve_spec(gen_ambient, gen_gap, gen_segment, gen_noise);
            spec.spread_angle = gen_spread;
            break;
        }
        spec.ambient_noise = gen_noise;
        save_dataset(generate_dataset(spec, gen_n, SeedSpec{seed, 0}), gen_out);
        return 0;
    }

    if (train->parsed()) {
        const Dataset data = load_dataset(train_data);
        Model model;
        if (train_model == "tree") {
            model = train_decision_tree(data);
        } else {
            const std::uint64_t seed = require_seed(train_seed);
            const TrainConfig cfg = train_config_from_flags(train_lr, train_epochs, train_batch,
                                                            train_init, train_init_scale, seed);
            if (train_model == "linear")
                model = train_logistic_regression(data, cfg);
            else if (train_model == "mlp")
                model = train_mlp(data, parse_hidden(train_hidden), cfg);
            else
                throw usage_error("--model must be linear, mlp or tree");
        }
        save_model(model, train_out);
        return 0;
    }

    if (probe->parsed()) {
        const Model model = load_model(probe_model);
        std::optional<Dataset> data;
        if (!probe_data.empty()) data = load_dataset(probe_data);

        nlohmann::json report;
        if (probe_complexity) {
            if (!data) throw usage_error("--complexity needs --data for the anchor point");
            if (probe_anchor < 0 || static_cast<std::size_t>(probe_anchor) >= data->size())
                throw data_error("anchor index out of range");
            const Vec& anchor = data->points[static_cast<std::size_t>(probe_anchor)];
            double radius = 0.0;
            if (probe_radius == "auto") {
                std::vector<double> dists = hyperplane_distances(model, anchor);
                if (dists.empty()) throw numeric_error("no hyperplanes near a degenerate model");
                radius = median(std::move(dists));
            } else {
                radius = parse_double(probe_radius);
            }
            const ComplexityReport complexity = local_complexity(model, anchor, radius, probe_rho);
            report["complexity"] = {{"anchor_index", probe_anchor},
                                    {"radius", complexity.radius},
                                    {"nearby_count", complexity.nearby_count},
                                    {"independent_count", complexity.independent_count},
                                    {"ratio", complexity.ratio},
                                    {"is_locally_complex", complexity.is_locally_complex}};
        }
        if (probe_decomp) {
            const auto* linear = std::get_if<LinearModel>(&model);
            if (!linear) throw data_error("--decomp needs a linear model");
            if (!data || !data->manifold || !data->manifold->basis)
                throw data_error("--decomp needs a dataset with a manifold basis");
            const OffManifoldDecomposition decomp =
                off_manifold_decomposition(*linear, *data->manifold->basis);
            report["decomposition"] = {{"shrink_factor", decomp.shrink_factor},
                                       {"angle", decomp.angle}};
        }
        if (probe_fragility || !probe_margins.empty()) {
            const auto* linear = std::get_if<LinearModel>(&model);
            if (!linear) throw data_error("margin statistics need a linear model");
            if (!data) throw usage_error("margin statistics need --data");
            const FragilityStats stats = fragility_stats(*linear, *data, probe_eps);
            nlohmann::json frag = {{"min_margin", stats.min_margin},
                                   {"epsilon", stats.epsilon},
                                   {"frac_below_epsilon", stats.frac_below_epsilon}};
            if (stats.shrink_factor) frag["shrink_factor"] = *stats.shrink_factor;
            report["fragility"] = frag;
            if (!probe_margins.empty()) {
                std::ostringstream csv;
                write_margins_csv(csv, stats, data->labels);
                write_text_file(probe_margins, csv.str());
            }
        }
        if (report.empty()) throw usage_error("probe: pass --complexity, --decomp or --fragility");
        if (probe_out.empty())
            std::cout << report.dump(2) << '\n';
        else
            write_text_file(probe_out, report.dump(2) + "\n");
        return 0;
    }

    if (attack->parsed()) {
        const Model model = load_model(attack_model);
        const Dataset data = load_dataset(attack_data);
        std::optional<Model> target;
        if (!attack_target.empty()) target = load_model(attack_target);

        std::ostringstream csv;
        write_attacks_csv_header(csv);
        for (std::size_t i = 0; i < data.size(); ++i) {
            AttackResult result;
            if (attack_kind == "minimal") {
                const auto* linear = std::get_if<LinearModel>(&model);
                if (!linear) throw data_error("minimal attack needs a linear model");
                result = minimal_linear_attack(*linear, data.points[i], attack_overshoot);
            } else if (attack_kind == "fgsm") {
                result = gradient_sign_attack(model, data.points[i], data.labels[i], attack_eps);
            } else {
                throw usage_error("--kind must be minimal or fgsm");
            }
            if (target)
                write_attack_csv_row(csv, i, result, attack_target,
                                     transfer_attack(result, *target) ? "1" : "0");
            else
                write_attack_csv_row(csv, i, result);
        }
        write_text_file(attack_out, csv.str());
        return 0;
    }

    if (lid->parsed()) {
        const Dataset data = load_dataset(lid_data);
        std::ostringstream csv;
        write_lid_csv_header(csv);
        if (lid_estimator == "twonn") {
            LidEstimate est = twonn(data);
            write_lid_csv_row(csv, est, "all");
        } else if (lid_estimator == "mle") {
            for (std::size_t i = 0; i < data.size(); ++i) {
                LidEstimate est = lid_mle(data.points[i], data, lid_k);
                est.anchor_index = static_cast<long>(i);
                write_lid_csv_row(csv, est, "all");
            }
        } else {
            throw usage_error("--estimator must be mle or twonn");
        }
        write_text_file(lid_out, csv.str());
        return 0;
    }

    if (experiment->parsed()) {
        const std::uint64_t seed = require_seed(exp_seed);
        ExperimentConfig cfg = config_from_json(read_text_file(exp_config));
        for (const std::string& assignment : exp_sets) {
            try {
                apply_override(cfg, assignment);
            } catch (const data_error& e) {
                throw usage_error(e.what());
            }
        }
        const ExperimentResult result = run_experiment(cfg, seed, exp_workers);
        const std::string sidecar = exp_sidecar.empty() ? exp_out + ".json" : exp_sidecar;
        write_result_files(result, exp_out, sidecar);
        return 0;
    }

    if (plot->parsed()) {
        PlotOptions options;
        options.metrics = plot_metrics;
        options.log_x = plot_loglog || plot_logx;
        options.log_y = plot_loglog || plot_logy;
        write_text_file(plot_out, plot_experiment_csv(read_text_file(plot_in), options));
        return 0;
    }

    throw usage_error("no subcommand given");
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    try {
        return run(argc, argv);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}

} // namespace hdfl
